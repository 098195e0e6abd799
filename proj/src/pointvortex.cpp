#include "quadvortex/pointvortex.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace qv {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

bool inside(Vec2 z) { return std::isfinite(z.x1) && std::isfinite(z.x2) && z.x1 > 0.0 && z.x2 > 0.0; }

Vec2 guarded_step(Vec2 z, double dt, int halvings_left) {
    const Vec2 next = pv_step(z, dt);
    if (inside(next)) return next;
    if (halvings_left <= 0)
        throw std::runtime_error("pv_integrate: step rejected repeatedly near an axis; reduce dt");
    const Vec2 mid = guarded_step(z, 0.5 * dt, halvings_left - 1);
    return guarded_step(mid, 0.5 * dt, halvings_left - 1);
}

}  // namespace

Vec2 pv_velocity(Vec2 z) {
    if (!(z.x1 > 0.0) || !(z.x2 > 0.0))
        throw std::invalid_argument("pv_velocity: point must lie in the open quadrant");
    const double r2 = z.x1 * z.x1 + z.x2 * z.x2;
    return {z.x1 * z.x1 / (z.x2 * r2) / kFourPi, -z.x2 * z.x2 / (z.x1 * r2) / kFourPi};
}

OrbitInvariantValue orbit_invariant(Vec2 z) {
    const double p = z.x1 * z.x2;
    return {p * p / (z.x1 * z.x1 + z.x2 * z.x2)};
}

double orbit_asymptote(Vec2 p) { return p.x1 * p.x2 / std::hypot(p.x1, p.x2); }

double pv_hamiltonian(Vec2 z) { return std::log(2.0 * z.x1 * z.x2 / std::hypot(z.x1, z.x2)); }

Vec2 pv_step(Vec2 z, double dt) {
    const Vec2 k1 = pv_velocity(z);
    const Vec2 z2 = z + (0.5 * dt) * k1;
    if (!inside(z2)) return {-1.0, -1.0};
    const Vec2 k2 = pv_velocity(z2);
    const Vec2 z3 = z + (0.5 * dt) * k2;
    if (!inside(z3)) return {-1.0, -1.0};
    const Vec2 k3 = pv_velocity(z3);
    const Vec2 z4 = z + dt * k3;
    if (!inside(z4)) return {-1.0, -1.0};
    const Vec2 k4 = pv_velocity(z4);
    return z + (dt / 6.0) * ((k1 + 2.0 * k2) + (2.0 * k3 + k4));
}

std::vector<PVSample> pv_integrate(Vec2 p, const PVOptions& o) {
    if (!inside(p)) throw std::invalid_argument("pv_integrate: start must lie in the open quadrant");
    if (!(o.dt > 0.0)) throw std::invalid_argument("pv_integrate: dt must be positive");
    if (!(o.t_end >= 0.0)) throw std::invalid_argument("pv_integrate: t_end must be nonnegative");
    if (o.sample_every < 1) throw std::invalid_argument("pv_integrate: sample_every must be >= 1");
    const long steps = static_cast<long>(std::ceil(o.t_end / o.dt - 1e-9));
    auto sample = [](double t, Vec2 z) {
        return PVSample{t, z, orbit_invariant(z).i_value, pv_hamiltonian(z)};
    };
    std::vector<PVSample> out;
    out.push_back(sample(0.0, p));
    Vec2 z = p;
    for (long k = 1; k <= steps; ++k) {
        const double t_prev = (k - 1) * o.dt;
        const double t = (k == steps) ? o.t_end : k * o.dt;
        z = guarded_step(z, t - t_prev, o.max_halvings);
        const bool stop = o.stop_z1 > 0.0 && z.x1 >= o.stop_z1;
        if (k % o.sample_every == 0 || k == steps || stop) out.push_back(sample(t, z));
        if (stop) break;
    }
    return out;
}

void write_trajectory_csv(const std::vector<PVSample>& samples, const std::filesystem::path& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << "t,z1,z2,i_value,k234\n";
    char buf[128];
    for (const auto& s : samples) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t, s.z.x1, s.z.x2,
                      s.i_value, s.k234);
        f << buf;
    }
}

}  // namespace qv

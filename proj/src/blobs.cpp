#include "quadvortex/blobs.hpp"

#include "quadvortex/parallel.hpp"
#include "quadvortex/rearrange.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace qv {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool in_open_quadrant(Vec2 z) {
    return std::isfinite(z.x1) && std::isfinite(z.x2) && z.x1 > 0.0 && z.x2 > 0.0;
}

std::vector<std::string> tokens_of(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> out;
    for (std::string t; in >> t;) out.push_back(t);
    return out;
}

double number(const std::string& tok, int line) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size() || !std::isfinite(v))
        throw FormatError(line, "non-numeric token '" + tok + "'");
    return v;
}

}  // namespace

double BlobEnsemble::total_circulation() const { return pairwise_sum(gammas); }

BlobFault::BlobFault(std::size_t particle, double t, const std::string& what)
    : std::runtime_error(what + " (particle " + std::to_string(particle) + ", t=" +
                         std::to_string(t) + ")"),
      particle_(particle),
      time_(t) {}

BlobEnsemble discretize(const QuadrantField& rho, int blobs_per_cell, double blob_delta) {
    if (!rho.is_nonnegative()) throw std::invalid_argument("discretize: negative values");
    const int m = static_cast<int>(std::lround(std::sqrt(static_cast<double>(blobs_per_cell))));
    if (blobs_per_cell < 1 || m * m != blobs_per_cell)
        throw std::invalid_argument("discretize: blobs_per_cell must be a perfect square");
    const double h = rho.h();
    const double sub = h / m;
    BlobEnsemble ens;
    ens.blob_delta = blob_delta > 0.0 ? blob_delta : 1.5 * sub;
    const double area = sub * sub;
    for (int i = 0; i < rho.n(); ++i) {
        for (int j = 0; j < rho.n(); ++j) {
            const double v = rho.at(i, j);
            if (!(v > 0.0)) continue;
            const Vec2 corner = rho.grid().origin + Vec2{j * h, i * h};
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) {
                    ens.positions.push_back(corner + Vec2{(b + 0.5) * sub, (a + 0.5) * sub});
                    ens.gammas.push_back(v * area);
                }
        }
    }
    if (ens.positions.empty()) throw std::invalid_argument("discretize: empty field");
    return ens;
}

std::vector<Vec2> ensemble_velocity(const BlobEnsemble& ens) {
    return ensemble_velocity(ens, ens.positions);
}

std::vector<Vec2> ensemble_velocity(const BlobEnsemble& ens, const std::vector<Vec2>& positions) {
    const std::size_t m = positions.size();
    std::vector<double> px(m), py(m);
    for (std::size_t k = 0; k < m; ++k) {
        px[k] = positions[k].x1;
        py[k] = positions[k].x2;
    }
    const double* gam = ens.gammas.data();
    const double d2 = ens.blob_delta * ens.blob_delta;
    std::vector<Vec2> u(m);
    const std::size_t chunk = 16;
    const std::size_t chunks = (m + chunk - 1) / chunk;
    parallel_for(0, chunks, [&](std::size_t c) {
        const std::size_t end = std::min(m, (c + 1) * chunk);
        for (std::size_t t = c * chunk; t < end; ++t) {
            const double x1 = px[t];
            const double x2 = py[t];
            double a1[4] = {0.0, 0.0, 0.0, 0.0};
            double a2[4] = {0.0, 0.0, 0.0, 0.0};
            auto pair = [&](std::size_t k, std::size_t l) {
                const double dm1 = x1 - px[k], dp1 = x1 + px[k];
                const double dm2 = x2 - py[k], dp2 = x2 + py[k];
                // copies: p (+), -p (+), (p1,-p2) (-), (-p1,p2) (-)
                const double iP = 1.0 / (dm1 * dm1 + dm2 * dm2 + d2);
                const double iA = 1.0 / (dp1 * dp1 + dp2 * dp2 + d2);
                const double iB = 1.0 / (dm1 * dm1 + dp2 * dp2 + d2);
                const double iT = 1.0 / (dp1 * dp1 + dm2 * dm2 + d2);
                const double v1 = (-dm2 * iP + -dp2 * iA) - (-dp2 * iB + -dm2 * iT);
                const double v2 = (dm1 * iP + dp1 * iA) - (dm1 * iB + dp1 * iT);
                a1[l] += gam[k] * v1;
                a2[l] += gam[k] * v2;
            };
            const std::size_t full = m - m % 4;
            for (std::size_t s = 0; s < full; s += 4) {
                pair(s, 0);
                pair(s + 1, 1);
                pair(s + 2, 2);
                pair(s + 3, 3);
            }
            for (std::size_t k = full; k < m; ++k) pair(k, k - full);
            u[t] = {((a1[0] + a1[1]) + (a1[2] + a1[3])) / kTwoPi,
                    ((a2[0] + a2[1]) + (a2[2] + a2[3])) / kTwoPi};
        }
    });
    return u;
}

BlobEnsemble step(const BlobEnsemble& ens, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
    const std::size_t m = ens.size();
    auto shifted = [&](const std::vector<Vec2>& k, double s) {
        std::vector<Vec2> out(m);
        for (std::size_t i = 0; i < m; ++i) out[i] = ens.positions[i] + s * k[i];
        return out;
    };
    const auto k1 = ensemble_velocity(ens, ens.positions);
    const auto k2 = ensemble_velocity(ens, shifted(k1, 0.5 * dt));
    const auto k3 = ensemble_velocity(ens, shifted(k2, 0.5 * dt));
    const auto k4 = ensemble_velocity(ens, shifted(k3, dt));
    BlobEnsemble next = ens;
    next.t = ens.t + dt;
    for (std::size_t i = 0; i < m; ++i) {
        next.positions[i] =
            ens.positions[i] + (dt / 6.0) * ((k1[i] + 2.0 * k2[i]) + (2.0 * k3[i] + k4[i]));
        if (!in_open_quadrant(next.positions[i]))
            throw BlobFault(i, next.t, "particle left the open quadrant");
    }
    return next;
}

long step_count(double dt, double t_end) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (!(t_end >= 0.0)) throw std::invalid_argument("t_end must be nonnegative");
    return static_cast<long>(std::floor(t_end / dt + 1e-9));
}

BlobEnsemble run(const BlobEnsemble& ens, double dt, double t_end, int every,
                 const std::function<void(const BlobEnsemble&, long)>& on_snapshot) {
    if (every < 1) throw std::invalid_argument("run: snapshot interval must be >= 1");
    const long steps = step_count(dt, t_end);
    const double t0 = ens.t;
    BlobEnsemble cur = ens;
    if (on_snapshot) on_snapshot(cur, 0);
    for (long k = 1; k <= steps; ++k) {
        cur = step(cur, dt);
        cur.t = t0 + k * dt;
        if (on_snapshot && k % every == 0) on_snapshot(cur, k);
    }
    return cur;
}

QuadrantField deposit(const BlobEnsemble& ens, const GridSpec& grid) {
    QuadrantField f(grid);
    const int n = grid.n;
    const double h = grid.h();
    const Vec2 o = grid.origin;
    for (std::size_t k = 0; k < ens.size(); ++k) {
        const Vec2 x = ens.positions[k];
        if (x.x1 < o.x1 || x.x1 > o.x1 + grid.length || x.x2 < o.x2 || x.x2 > o.x2 + grid.length)
            throw std::out_of_range("deposit: particle " + std::to_string(k) +
                                    " outside the grid window");
        const double fx = (x.x1 - o.x1) / h - 0.5;
        const double fy = (x.x2 - o.x2) / h - 0.5;
        const int j0 = static_cast<int>(std::floor(fx));
        const int i0 = static_cast<int>(std::floor(fy));
        const double tx = fx - j0;
        const double ty = fy - i0;
        auto clamp = [n](int v) { return std::min(std::max(v, 0), n - 1); };
        const double g = ens.gammas[k];
        f.at(clamp(i0), clamp(j0)) += g * (1.0 - ty) * (1.0 - tx);
        f.at(clamp(i0), clamp(j0 + 1)) += g * (1.0 - ty) * tx;
        f.at(clamp(i0 + 1), clamp(j0)) += g * ty * (1.0 - tx);
        f.at(clamp(i0 + 1), clamp(j0 + 1)) += g * ty * tx;
    }
    const double inv_area = 1.0 / (h * h);
    for (double& v : f.values()) v *= inv_area;
    return f;
}

std::string format_blobs(const BlobEnsemble& ens) {
    std::string out;
    char buf[96];
    std::snprintf(buf, sizeof buf, "BLOBS v1 %zu %.17g %.17g\n", ens.size(), ens.blob_delta, ens.t);
    out += buf;
    for (std::size_t k = 0; k < ens.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", ens.positions[k].x1,
                      ens.positions[k].x2, ens.gammas[k]);
        out += buf;
    }
    return out;
}

BlobEnsemble parse_blobs(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw FormatError(1, "missing BLOBS header");
    const auto h = tokens_of(line);
    if (h.size() != 5 || h[0] != "BLOBS" || h[1] != "v1")
        throw FormatError(1, "malformed header, expected 'BLOBS v1 <M> <blob_delta> <t>'");
    std::size_t m = 0;
    auto [p, ec] = std::from_chars(h[2].data(), h[2].data() + h[2].size(), m);
    if (ec != std::errc() || p != h[2].data() + h[2].size())
        throw FormatError(1, "malformed header: bad particle count '" + h[2] + "'");
    BlobEnsemble ens;
    ens.blob_delta = number(h[3], 1);
    ens.t = number(h[4], 1);
    if (!(ens.blob_delta > 0.0)) throw FormatError(1, "blob_delta must be positive");
    for (std::size_t k = 0; k < m; ++k) {
        const int line_no = static_cast<int>(k) + 2;
        if (!std::getline(in, line))
            throw FormatError(line_no, "expected " + std::to_string(m) + " particles, missing particle " +
                                           std::to_string(k));
        const auto t = tokens_of(line);
        if (t.size() != 3) throw FormatError(line_no, "expected 'x1 x2 gamma'");
        ens.positions.push_back({number(t[0], line_no), number(t[1], line_no)});
        ens.gammas.push_back(number(t[2], line_no));
    }
    while (std::getline(in, line))
        if (!tokens_of(line).empty())
            throw FormatError(static_cast<int>(m) + 2, "trailing data after last particle");
    return ens;
}

void write_blobs(const BlobEnsemble& ens, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << format_blobs(ens);
}

BlobEnsemble read_blobs(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_blobs(buf.str());
}

namespace {

Vec2 particle_com(const BlobEnsemble& ens, double* mass_out = nullptr) {
    const std::size_t m = ens.size();
    std::vector<double> g(m), gx(m), gy(m);
    for (std::size_t k = 0; k < m; ++k) {
        g[k] = ens.gammas[k];
        gx[k] = ens.gammas[k] * ens.positions[k].x1;
        gy[k] = ens.gammas[k] * ens.positions[k].x2;
    }
    const double mass = pairwise_sum(g);
    if (mass_out) *mass_out = mass;
    if (!(mass > 0.0)) return {};
    return {pairwise_sum(gx) / mass, pairwise_sum(gy) / mass};
}

}  // namespace

Diagnostics::Diagnostics(const BlobEnsemble& initial, const GridSpec& window,
                         std::optional<LambParams> lamb)
    : window0_(window), lamb_(lamb) {
    window0_.validate();
    com0_ = particle_com(initial);
    rho0_star_ = radial_rearrangement(deposit(initial, window0_));
}

GridSpec Diagnostics::window_for(const BlobEnsemble& ens) const {
    const Vec2 com = particle_com(ens);
    const double h = window0_.h();
    GridSpec g = window0_;
    g.origin.x1 = std::max(0.0, window0_.origin.x1 + h * std::nearbyint((com.x1 - com0_.x1) / h));
    g.origin.x2 = std::max(0.0, window0_.origin.x2 + h * std::nearbyint((com.x2 - com0_.x2) / h));
    return g;
}

DiagnosticsRow Diagnostics::evaluate(const BlobEnsemble& ens) const {
    DiagnosticsRow row;
    row.t = ens.t;
    const std::size_t m = ens.size();
    std::vector<double> g(m), gx(m), gy(m);
    for (std::size_t k = 0; k < m; ++k) {
        g[k] = ens.gammas[k];
        gx[k] = ens.gammas[k] * ens.positions[k].x1;
        gy[k] = ens.gammas[k] * ens.positions[k].x2;
    }
    row.mass = pairwise_sum(g);
    row.x1 = pairwise_sum(gx);
    row.x2 = pairwise_sum(gy);
    row.mu = row.x2;
    row.field = deposit(ens, window_for(ens));
    row.energy = energy_decompose(row.field);
    if (row.mass > 0.0) {
        row.delta_rearr = asymmetry(row.field).delta;
        row.l1_dist_rho0star = best_translation(row.field, rho0_star_).l1;
        if (lamb_) {
            const TranslationFit fit = fit_translation(row.field, *lamb_);
            row.tau_fit = fit.tau;
            row.tau_residual = fit.residual;
        }
    }
    return row;
}

}  // namespace qv

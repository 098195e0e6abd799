#include "quadvortex/lamb.hpp"

#include "quadvortex/bessel.hpp"
#include "quadvortex/energy.hpp"
#include "quadvortex/parallel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qv {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInvPhi = 0.6180339887498949;

double profile_coefficient() {
    static const double coef = -2.0 * c_l() / bessel_j(0, c_l());
    return coef;
}

double upper_half_mass() {
    static const double m = lamb_radial_integrals(8192).mass;
    return m;
}

}  // namespace

double LambParams::mu() const { return a * a * a * b * kPi; }

double LambParams::kappa() const { return (a * b) * (a * b) * kappa_l(); }

LambParams LambParams::from_mu_kappa(double mu, double kappa) {
    if (!(mu > 0.0) || !(kappa > 0.0))
        throw std::invalid_argument("from_mu_kappa: mu and kappa must be positive");
    const double kl = kappa_l();
    LambParams p;
    p.a = std::sqrt(mu / kPi) * std::pow(kl / kappa, 0.25);
    p.b = std::sqrt(kPi / mu) * std::pow(kappa / kl, 0.75);
    return p;
}

double kappa_l() { return kPi * c_l() * c_l(); }

double lamb_profile(double r) {
    if (r < 0.0 || r > 1.0) return 0.0;
    return profile_coefficient() * bessel_j(1, c_l() * r);
}

double lamb_vorticity(Vec2 x, const LambParams& params, double center_x1) {
    const double dx = x.x1 - center_x1;
    const double dy = x.x2;
    const double r = std::hypot(dx, dy);
    if (r > params.a || r == 0.0) return 0.0;
    return params.b * lamb_profile(r / params.a) * (dy / r);
}

RadialLambIntegrals lamb_radial_integrals(int nodes) {
    if (nodes < 1) throw std::invalid_argument("lamb_radial_integrals: nodes must be positive");
    std::vector<double> m(nodes), r2(nodes), q(nodes);
    for (int k = 0; k < nodes; ++k) {
        const double r = (k + 0.5) / nodes;
        const double g = lamb_profile(r);
        m[k] = g * r;
        r2[k] = g * r * r;
        q[k] = g * g * r;
    }
    const double w = 1.0 / nodes;
    RadialLambIntegrals out;
    out.mass = 2.0 * w * pairwise_sum(m);
    out.mu = 0.5 * kPi * w * pairwise_sum(r2);
    out.kappa = 0.5 * kPi * w * pairwise_sum(q);
    return out;
}

LambInvariants lamb_invariants(int grid_n, double domain_len, int radial_nodes) {
    const GridSpec grid{grid_n, domain_len, {}};
    grid.validate();
    if (grid.h() > 1.0 / 32.0)
        throw std::invalid_argument("lamb_invariants: grid under-resolves the unit disk (a/h < 32)");
    if (domain_len < 2.0)
        throw std::invalid_argument("lamb_invariants: domain_len must hold the unit disk");
    LambInvariants inv;
    inv.c_l = c_l();
    const RadialLambIntegrals ri = lamb_radial_integrals(radial_nodes);
    inv.mu_l = ri.mu;
    inv.kappa_l = ri.kappa;
    inv.kappa_l_analytic = kappa_l();
    inv.energy_analytic = 4.0 * inv.kappa_l_analytic / (inv.c_l * inv.c_l);
    const QuadrantField f = lamb_pair_field(0.5 * domain_len, LambParams{}, grid);
    inv.energy = energy_decompose(f).e_dipole;
    inv.speed = LambParams{}.speed();
    return inv;
}

QuadrantField lamb_pair_field(double d, const LambParams& params, const GridSpec& grid) {
    grid.validate();
    if (!(d >= params.a)) throw std::invalid_argument("lamb_pair_field: d must be at least a");
    const double x_lo = grid.origin.x1;
    const double x_hi = grid.origin.x1 + grid.length;
    const double y_hi = grid.origin.x2 + grid.length;
    if (d - params.a < x_lo || d + params.a > x_hi || grid.origin.x2 > 0.0 || params.a > y_hi)
        throw std::invalid_argument("lamb_pair_field: dipole support escapes the grid");
    return field_from_fn([&](Vec2 x) { return lamb_vorticity(x, params, d); }, grid);
}

double penalized_energy(const QuadrantField& field, double energy) {
    const double cl = c_l();
    return energy - 2.0 / (cl * cl) * integral_of_square(field);
}

double lamb_fit_objective(const QuadrantField& field, const LambParams& params, double tau) {
    const int n = field.n();
    std::vector<double> l1(static_cast<std::size_t>(n)), l2(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double s1 = 0.0, s2 = 0.0;
        for (int j = 0; j < n; ++j) {
            const double d = field.at(i, j) - lamb_vorticity(field.center(i, j), params, tau);
            s1 += std::abs(d);
            s2 += d * d;
        }
        l1[i] = s1;
        l2[i] = s2;
    }
    const double a = field.cell_area();
    return a * pairwise_sum(l1) + std::sqrt(a * pairwise_sum(l2));
}

double lamb_reference_norm(const LambParams& params) {
    return params.b * params.a * params.a * upper_half_mass() +
           params.a * params.b * std::sqrt(kappa_l());
}

TranslationFit fit_translation(const QuadrantField& field_right, const LambParams& params) {
    if (!field_right.is_nonnegative())
        throw std::invalid_argument("fit_translation: field must be nonnegative");
    const Moments m = moments(field_right);
    if (!(m.mass > 0.0)) throw std::invalid_argument("fit_translation: zero-mass field");
    const double h = field_right.h();
    const double seed = m.x1 / m.mass;
    double lo = std::max(h, seed - params.a);
    double hi = std::max(lo + h, seed + params.a);
    auto f = [&](double t) { return lamb_fit_objective(field_right, params, t); };
    double c = hi - kInvPhi * (hi - lo);
    double d = lo + kInvPhi * (hi - lo);
    double fc = f(c), fd = f(d);
    while (hi - lo > 1e-6 * std::max(1.0, std::abs(seed))) {
        if (fc <= fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - kInvPhi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + kInvPhi * (hi - lo);
            fd = f(d);
        }
    }
    TranslationFit out;
    out.tau = 0.5 * (lo + hi);
    out.residual = f(out.tau);
    return out;
}

}  // namespace qv

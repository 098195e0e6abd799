#include "quadvortex/energy.hpp"

#include "quadvortex/bessel.hpp"
#include "quadvortex/parallel.hpp"
#include "quadvortex/rearrange.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace qv {

namespace {

constexpr double kPi = std::numbers::pi;

// Refined-subdivision values, see tests/test_energy.cpp for the oracle.
constexpr double kCellSelf = 0.805086721950087151;
constexpr double kCellPoint = 1.06117542688252435;

struct SupportCell {
    int i;
    int j;
    double v;
};

std::vector<SupportCell> support_of(const QuadrantField& rho) {
    std::vector<SupportCell> cells;
    for (int i = 0; i < rho.n(); ++i)
        for (int j = 0; j < rho.n(); ++j)
            if (rho.at(i, j) > 0.0) cells.push_back({i, j, rho.at(i, j)});
    return cells;
}

bool thin_support(const std::vector<SupportCell>& cells) {
    if (cells.empty()) return false;
    int i0 = cells.front().i, i1 = i0, j0 = cells.front().j, j1 = j0;
    for (const auto& c : cells) {
        i0 = std::min(i0, c.i);
        i1 = std::max(i1, c.i);
        j0 = std::min(j0, c.j);
        j1 = std::max(j1, c.j);
    }
    return std::min(i1 - i0, j1 - j0) + 1 < 8;
}

// Symmetric double sum  sum_{c,c'} v_c v_c' K(c,c')  with per-source partial
// sums and a pairwise tree over sources.
template <class Kernel>
double symmetric_pair_sum(const std::vector<SupportCell>& cells, Kernel kernel) {
    const std::size_t m = cells.size();
    std::vector<double> rows(m);
    parallel_for(0, m, [&](std::size_t k) {
        const SupportCell& a = cells[k];
        double off = 0.0;
        for (std::size_t l = k + 1; l < m; ++l) off += cells[l].v * kernel(a, cells[l]);
        rows[k] = a.v * (2.0 * off + a.v * kernel(a, a));
    });
    return pairwise_sum(rows);
}

}  // namespace

double cell_self_constant() { return kCellSelf; }
double cell_point_constant() { return kCellPoint; }

KernelSplit kernel_split(Vec2 x, Vec2 y) {
    const double d = std::hypot(x.x1 - y.x1, x.x2 - y.x2);
    if (!(d > 0.0)) throw std::invalid_argument("kernel_split: coincident points");
    KernelSplit k;
    k.k1 = -std::log(d);
    k.k2 = std::log(std::hypot(x.x1 + y.x1, x.x2 - y.x2));
    k.k3 = -std::log(std::hypot(x.x1 + y.x1, x.x2 + y.x2));
    k.k4 = std::log(std::hypot(x.x1 - y.x1, x.x2 + y.x2));
    k.k234 = k.k2 + k.k3 + k.k4;
    k.total = k.k1 + k.k2 + k.k3 + k.k4;
    return k;
}

double half_plane_green(Vec2 x, Vec2 y) {
    const double dx = x.x1 - y.x1;
    const double dy = x.x2 - y.x2;
    const double r2 = dx * dx + dy * dy;
    if (!(r2 > 0.0)) throw std::invalid_argument("half_plane_green: coincident points");
    return std::log1p(4.0 * x.x2 * y.x2 / r2) / (4.0 * kPi);
}

EnergyReport energy_decompose(const QuadrantField& rho) {
    if (!rho.is_nonnegative()) throw std::invalid_argument("energy_decompose: negative values");
    EnergyReport r;
    const int n = rho.n();
    const double h = rho.h();
    const Vec2 o = rho.grid().origin;
    const auto cells = support_of(rho);
    r.quadrature.grid_n = n;
    r.quadrature.h = h;
    r.quadrature.support_cells = cells.size();
    r.quadrature.under_resolved = thin_support(cells);
    if (cells.empty()) return r;

    const int w = 2 * n - 1;
    std::vector<double> t1(static_cast<std::size_t>(n) * n);
    std::vector<double> t2(static_cast<std::size_t>(w) * n);
    std::vector<double> t3(static_cast<std::size_t>(w) * w);
    std::vector<double> t4(static_cast<std::size_t>(n) * w);
    const double log_h = std::log(h);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            t1[a * n + b] = -log_h - 0.5 * std::log(static_cast<double>(a) * a + double(b) * b);
    t1[0] = -log_h + kCellSelf;
    for (int s = 0; s < w; ++s) {
        const double sx = 2.0 * o.x1 + (s + 1) * h;
        const double sy = 2.0 * o.x2 + (s + 1) * h;
        for (int d = 0; d < n; ++d) {
            t2[s * n + d] = std::log(std::hypot(sx, d * h));
            t4[d * w + s] = std::log(std::hypot(d * h, sy));
        }
        for (int s2 = 0; s2 < w; ++s2)
            t3[s * w + s2] = -std::log(std::hypot(sx, 2.0 * o.x2 + (s2 + 1) * h));
    }

    const std::size_t m = cells.size();
    std::vector<double> r1(m), r2(m), r3(m), r4(m), rt(m);
    parallel_for(0, m, [&](std::size_t k) {
        const SupportCell& c = cells[k];
        double a1 = 0.0, a2 = 0.0, a3 = 0.0, a4 = 0.0, at = 0.0;
        auto add = [&](const SupportCell& e, double weight) {
            const int di = std::abs(c.i - e.i);
            const int dj = std::abs(c.j - e.j);
            const int s1 = c.j + e.j;
            const int s2 = c.i + e.i;
            const double k1 = t1[di * n + dj];
            const double k2 = t2[s1 * n + di];
            const double k3 = t3[s1 * w + s2];
            const double k4 = t4[dj * w + s2];
            const double wv = weight * e.v;
            a1 += wv * k1;
            a2 += wv * k2;
            a3 += wv * k3;
            a4 += wv * k4;
            at += wv * ((k1 + k2) + (k3 + k4));
        };
        for (std::size_t l = k + 1; l < m; ++l) add(cells[l], 2.0);
        add(c, 1.0);
        r1[k] = c.v * a1;
        r2[k] = c.v * a2;
        r3[k] = c.v * a3;
        r4[k] = c.v * a4;
        rt[k] = c.v * at;
    });
    const double h4 = h * h * h * h;
    r.e1 = h4 * pairwise_sum(r1);
    r.e2 = h4 * pairwise_sum(r2);
    r.e3 = h4 * pairwise_sum(r3);
    r.e4 = h4 * pairwise_sum(r4);
    r.e_total = 2.0 / kPi * (h4 * pairwise_sum(rt));
    r.e_dipole = (r.e1 + r.e4) / kPi;
    r.e_inter = -(r.e2 + r.e3) / kPi;
    r.l2sq = integral_of_square(rho);
    const double cl = c_l();
    r.e_hat = r.e_dipole - 2.0 / (cl * cl) * r.l2sq;
    return r;
}

InteractionResult interaction_energy(const QuadrantField& rho, double d_hint) {
    if (!rho.is_nonnegative()) throw std::invalid_argument("interaction_energy: negative values");
    const auto cells = support_of(rho);
    InteractionResult out;
    if (cells.empty()) return out;
    for (const auto& c : cells) {
        const Vec2 x = rho.center(c.i, c.j);
        if (x.x1 < d_hint)
            throw std::invalid_argument("interaction_energy: support reaches x1 < d_hint");
    }
    const double sum = symmetric_pair_sum(cells, [&](const SupportCell& a, const SupportCell& b) {
        const Vec2 x = rho.center(a.i, a.j);
        const Vec2 y = rho.center(b.i, b.j);
        const double sx = x.x1 + y.x1;
        const double dy = x.x2 - y.x2;
        return std::log1p(4.0 * x.x2 * y.x2 / (sx * sx + dy * dy));
    });
    const double h2 = rho.cell_area();
    // 2 G = (1/2pi) log1p(...)
    out.e_inter = h2 * h2 * sum / (2.0 * kPi);
    const double mu = moments(rho).impulse_mu;
    out.bound = mu * mu / (kPi * d_hint * d_hint);
    out.holds = out.e_inter <= out.bound;
    return out;
}

double phi(double s) {
    if (!(s > 0.0)) throw std::invalid_argument("phi: s must be positive");
    return s < 3.0 ? -std::log(s) : -std::log(3.0);
}

double g_h(double s, double H) {
    if (!(H > 300.0)) throw std::invalid_argument("g_h: H must exceed 300");
    if (!(s > 0.0)) throw std::invalid_argument("g_h: s must be positive");
    return s >= H ? std::log(s) : std::log(H) + (s - H) / H;
}

double kernel_bound_excess(Vec2 x, Vec2 y, double H) {
    const double dx = x.x1 - y.x1;
    const double dy = x.x2 - y.x2;
    const double r2 = dx * dx + dy * dy;
    const double lhs = 0.5 * std::log1p(4.0 * x.x2 * y.x2 / r2);
    const double rhs = phi(std::sqrt(r2)) + g_h(2.0 * x.x2, H) + 300.0 / H;
    return lhs - rhs;
}

KernelBoundReport verify_kernel_bound(std::uint64_t samples, double H, std::uint64_t seed) {
    if (!(H > 300.0)) throw std::invalid_argument("verify_kernel_bound: H must exceed 300");
    KernelBoundReport rep;
    rep.max_excess = -std::numeric_limits<double>::infinity();
    auto record = [&](Vec2 x, Vec2 y) {
        const double e = kernel_bound_excess(x, y, H);
        if (e > 0.0) ++rep.violations;
        if (e > rep.max_excess) {
            rep.max_excess = e;
            rep.worst_x = x;
            rep.worst_y = y;
        }
    };
    auto place = [](double x2, double r, double theta) {
        const Vec2 x{0.0, x2};
        double s = std::sin(theta);
        if (x2 + r * s <= 0.0) s = -s;
        return std::pair{x, Vec2{r * std::cos(theta), x2 + r * s}};
    };

    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> lr(std::log(1e-6), std::log(1e6));
    std::uniform_real_distribution<double> lx(std::log(1e-3), std::log(1e6));
    std::uniform_real_distribution<double> ang(0.0, 2.0 * kPi);
    for (std::uint64_t k = 0; k < samples; ++k) {
        const double r = std::exp(lr(gen));
        const double x2 = std::exp(lx(gen));
        const double th = ang(gen);
        auto [x, y] = place(x2, r, th);
        if (y.x2 <= 0.0) continue;
        record(x, y);
        ++rep.samples;
    }

    const double eps[] = {-1e-9, 0.0, 1e-9};
    std::vector<double> heights = {1e-3, 1.0, 3.0, 10.0, H, 10.0 * H};
    for (double e : eps) {
        heights.push_back(H / 100.0 * (1.0 + e));
        heights.push_back(H / 2.0 * (1.0 + e));
    }
    for (double x2 : heights) {
        std::vector<double> radii = {1e-6, 1.0, 1e3};
        for (double e : eps) {
            radii.push_back(3.0 * (1.0 + e));
            radii.push_back(100.0 * x2 / H * (1.0 + e));
        }
        for (double r : radii) {
            for (int a = 0; a <= 32; ++a) {
                const double th = (a == 32) ? 0.5 * kPi : kPi * (a + 0.5) / 32.0;
                auto [x, y] = place(x2, r, th);
                if (y.x2 <= 0.0) continue;
                record(x, y);
                ++rep.seam_points;
            }
        }
    }
    return rep;
}

JensenResult jensen_gap(const QuadrantField& rho, double H) {
    const Moments m = moments(rho);
    if (!(m.mass > 0.0)) throw std::invalid_argument("jensen_gap: zero-mass field");
    const int n = rho.n();
    std::vector<double> rows(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double g = g_h(2.0 * rho.center(i, 0).x2, H);
        std::vector<double> terms(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) terms[j] = rho.at(i, j) * g;
        rows[i] = pairwise_sum(terms);
    }
    JensenResult r;
    r.lhs = rho.cell_area() * pairwise_sum(rows) / m.mass;
    r.rhs = g_h(2.0 * m.x2 / m.mass, H);
    return r;
}

double yy_constant(const RadialFn& dw, double r_star) {
    if (!(r_star > 0.0)) throw std::invalid_argument("yy_constant: R* must be positive");
    constexpr int kPoints = 10000;
    const double top = 20.0 * r_star;
    double c = std::numeric_limits<double>::infinity();
    for (int k = 0; k < kPoints; ++k) {
        const double r = top * std::pow(10.0, -6.0 * (kPoints - 1 - k) / (kPoints - 1));
        const double d = dw(r);
        if (!(d < 0.0)) throw std::invalid_argument("yy_constant: w' is not negative");
        c = std::min(c, -d / r);
    }
    return c;
}

RadialPotential RadialPotential::log_potential() {
    RadialPotential p;
    p.w = [](double r) { return -std::log(r); };
    p.dw = [](double r) { return -1.0 / r; };
    p.self_cell = [](double h) { return h * h * h * h * (-std::log(h) + kCellSelf); };
    return p;
}

RadialPotential RadialPotential::from(RadialFn w, RadialFn dw) {
    RadialPotential p;
    p.w = w;
    p.dw = std::move(dw);
    p.self_cell = [w = std::move(w)](double h) {
        constexpr int m = 256;
        std::vector<double> rows(m);
        for (int a = 0; a < m; ++a) {
            const double u = (a + 0.5) / m;
            double s = 0.0;
            for (int b = 0; b < m; ++b) {
                const double v = (b + 0.5) / m;
                s += w(h * std::hypot(u, v)) * (1.0 - u) * (1.0 - v);
            }
            rows[a] = s;
        }
        return 4.0 * h * h * h * h * pairwise_sum(rows) / (double(m) * m);
    };
    return p;
}

double interaction_energy_w(const QuadrantField& rho, const RadialPotential& potential) {
    const int n = rho.n();
    const double h = rho.h();
    const auto cells = support_of(rho);
    if (cells.empty()) return 0.0;
    const double h4 = h * h * h * h;
    std::vector<double> table(static_cast<std::size_t>(n) * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (a || b) table[a * n + b] = potential.w(h * std::hypot(double(a), double(b)));
    table[0] = potential.self_cell(h) / h4;
    const double sum = symmetric_pair_sum(cells, [&](const SupportCell& x, const SupportCell& y) {
        return table[std::abs(x.i - y.i) * n + std::abs(x.j - y.j)];
    });
    return h4 * sum;
}

StabilityGap stability_gap(const QuadrantField& rho, const RadialPotential& potential) {
    const RearrangementResult ar = asymmetry(rho);
    StabilityGap g;
    g.e_w = interaction_energy_w(rho, potential);
    g.e_w_star = interaction_energy_w(ar.rho_star, potential);
    g.gap = g.e_w_star - g.e_w;
    g.delta = ar.delta;
    g.r_star = support_radius(ar.rho_star);
    g.c = yy_constant(potential.dw, g.r_star);
    const double l1 = integral(rho);
    const double linf = rho.max_value();
    g.lower_bound = g.c * l1 * l1 * l1 / linf * g.delta * g.delta;
    g.slack = 10.0 * rho.h() * l1 * l1;
    return g;
}

EnergyDifferenceRatio energy_difference_ratio(const QuadrantField& a, const QuadrantField& b) {
    if (!(a.grid() == b.grid()))
        throw std::invalid_argument("energy_difference_ratio: fields on different grids");
    QuadrantField diff(a.grid()), sum(a.grid());
    for (std::size_t k = 0; k < a.values().size(); ++k) {
        diff.values()[k] = a.values()[k] - b.values()[k];
        sum.values()[k] = a.values()[k] + b.values()[k];
    }
    const NormSet nd = norms(diff, Domain::plane);
    const NormSet ns = norms(sum, Domain::plane);
    EnergyDifferenceRatio r;
    r.diff = std::abs(energy_decompose(a).e_total - energy_decompose(b).e_total);
    r.rhs = std::sqrt(nd.l1 * nd.l2 * ns.weighted_l1 * ns.l1);
    r.ratio = r.rhs > 0.0 ? r.diff / r.rhs : 0.0;
    return r;
}

}  // namespace qv

#include "quadvortex/rearrange.hpp"

#include "quadvortex/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qv {

namespace {

constexpr double kInvPhi = 0.6180339887498949;

struct IndexCom {
    double j = 0.0;
    double i = 0.0;
    double mass = 0.0;
};

IndexCom index_center_of_mass(const QuadrantField& f) {
    const int n = f.n();
    std::vector<double> m(n), mj(n), mi(n);
    for (int i = 0; i < n; ++i) {
        std::vector<double> a(n), b(n), c(n);
        for (int j = 0; j < n; ++j) {
            const double v = f.at(i, j);
            a[j] = v;
            b[j] = v * (j + 0.5);
            c[j] = v * (i + 0.5);
        }
        m[i] = pairwise_sum(a);
        mj[i] = pairwise_sum(b);
        mi[i] = pairwise_sum(c);
    }
    IndexCom r;
    r.mass = pairwise_sum(m);
    if (r.mass > 0.0) {
        r.j = pairwise_sum(mj) / r.mass;
        r.i = pairwise_sum(mi) / r.mass;
    }
    return r;
}

double integer_shift_l1(const QuadrantField& rho, const QuadrantField& profile, int sx, int sy) {
    const int n = rho.n();
    std::vector<double> rows(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int pi = i - sy;
        double s = 0.0;
        for (int j = 0; j < n; ++j) {
            const int pj = j - sx;
            const double p = (pi >= 0 && pi < n && pj >= 0 && pj < n) ? profile.at(pi, pj) : 0.0;
            s += std::abs(rho.at(i, j) - p);
        }
        rows[i] = s;
    }
    // profile rows/columns mapped outside
    double outside = 0.0;
    for (int k = 0; k < n; ++k) {
        const int ti = k + sy;
        for (int l = 0; l < n; ++l) {
            const int tj = l + sx;
            if (ti < 0 || ti >= n || tj < 0 || tj >= n) outside += profile.at(k, l);
        }
    }
    return (pairwise_sum(rows) + outside) * rho.cell_area();
}

double bilinear_shift_l1(const QuadrantField& rho, const QuadrantField& profile, double sx,
                         double sy, double profile_mass) {
    const int n = rho.n();
    auto p_at = [&](int i, int j) {
        return (i >= 0 && i < n && j >= 0 && j < n) ? profile.at(i, j) : 0.0;
    };
    std::vector<double> diff(static_cast<std::size_t>(n));
    std::vector<double> inside(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double py = i - sy;
        const int i0 = static_cast<int>(std::floor(py));
        const double fy = py - i0;
        double sd = 0.0;
        double si = 0.0;
        for (int j = 0; j < n; ++j) {
            const double px = j - sx;
            const int j0 = static_cast<int>(std::floor(px));
            const double fx = px - j0;
            const double v = (1.0 - fy) * ((1.0 - fx) * p_at(i0, j0) + fx * p_at(i0, j0 + 1)) +
                             fy * ((1.0 - fx) * p_at(i0 + 1, j0) + fx * p_at(i0 + 1, j0 + 1));
            sd += std::abs(rho.at(i, j) - v);
            si += v;
        }
        diff[i] = sd;
        inside[i] = si;
    }
    const double a = rho.cell_area();
    const double outside = std::max(0.0, profile_mass - a * pairwise_sum(inside));
    return a * pairwise_sum(diff) + outside;
}

void require_same_grid(const QuadrantField& a, const QuadrantField& b) {
    if (a.n() != b.n() || a.h() != b.h())
        throw std::invalid_argument("fields must share grid_n and cell size");
}

}  // namespace

Vec2 rearrangement_center(const GridSpec& grid) {
    return {grid.origin.x1 + 0.5 * grid.length, grid.origin.x2 + 0.5 * grid.length};
}

QuadrantField radial_rearrangement(const QuadrantField& rho) {
    if (!rho.is_nonnegative()) throw std::invalid_argument("radial_rearrangement: negative values");
    const int n = rho.n();
    const std::size_t cells = static_cast<std::size_t>(n) * n;
    std::vector<double> dist2(cells);
    const double c = 0.5 * n;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double dx = j + 0.5 - c;
            const double dy = i + 0.5 - c;
            dist2[static_cast<std::size_t>(i) * n + j] = dx * dx + dy * dy;
        }
    }
    std::vector<std::size_t> order(cells);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return dist2[a] < dist2[b]; });
    std::vector<double> sorted = rho.values();
    std::stable_sort(sorted.begin(), sorted.end(), std::greater<>());
    std::vector<double> out(cells, 0.0);
    for (std::size_t k = 0; k < cells; ++k) out[order[k]] = sorted[k];
    return QuadrantField(rho.grid(), std::move(out));
}

double shifted_l1_distance(const QuadrantField& rho, const QuadrantField& profile, Vec2 shift) {
    require_same_grid(rho, profile);
    const double h = rho.h();
    const double sx = shift.x1 / h;
    const double sy = shift.x2 / h;
    const double rx = std::nearbyint(sx);
    const double ry = std::nearbyint(sy);
    if (std::abs(sx - rx) < 1e-12 && std::abs(sy - ry) < 1e-12)
        return integer_shift_l1(rho, profile, static_cast<int>(rx), static_cast<int>(ry));
    const double pm = integral(profile);
    return bilinear_shift_l1(rho, profile, sx, sy, pm);
}

ShiftSearch best_translation(const QuadrantField& rho, const QuadrantField& profile, int window) {
    require_same_grid(rho, profile);
    const IndexCom cr = index_center_of_mass(rho);
    const IndexCom cp = index_center_of_mass(profile);
    if (!(cr.mass > 0.0)) throw std::invalid_argument("best_translation: zero-mass field");
    const int s0x = static_cast<int>(std::lround(cr.j - cp.j));
    const int s0y = static_cast<int>(std::lround(cr.i - cp.i));

    const int side = 2 * window + 1;
    std::vector<double> l1(static_cast<std::size_t>(side) * side);
    parallel_for(0, l1.size(), [&](std::size_t k) {
        const int ox = static_cast<int>(k) / side - window;
        const int oy = static_cast<int>(k) % side - window;
        l1[k] = integer_shift_l1(rho, profile, s0x + ox, s0y + oy);
    });
    std::size_t best = 0;
    for (std::size_t k = 1; k < l1.size(); ++k)
        if (l1[k] < l1[best]) best = k;
    double bx = s0x + static_cast<int>(best) / side - window;
    double by = s0y + static_cast<int>(best) % side - window;
    double best_l1 = l1[best];

    if (best_l1 > 0.0) {
        const double pm = integral(profile);
        auto golden = [&](auto objective, double lo, double hi) {
            double a = lo, b = hi;
            double c = b - kInvPhi * (b - a);
            double d = a + kInvPhi * (b - a);
            double fc = objective(c), fd = objective(d);
            while (b - a > 1e-4) {
                if (fc <= fd) {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - kInvPhi * (b - a);
                    fc = objective(c);
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + kInvPhi * (b - a);
                    fd = objective(d);
                }
            }
            const double x = 0.5 * (a + b);
            return std::pair{x, objective(x)};
        };
        for (int pass = 0; pass < 2; ++pass) {
            auto [x, fx] = golden(
                [&](double s) { return bilinear_shift_l1(rho, profile, s, by, pm); }, bx - 1.0,
                bx + 1.0);
            if (fx < best_l1) {
                bx = x;
                best_l1 = fx;
            }
            auto [y, fy] = golden(
                [&](double s) { return bilinear_shift_l1(rho, profile, bx, s, pm); }, by - 1.0,
                by + 1.0);
            if (fy < best_l1) {
                by = y;
                best_l1 = fy;
            }
        }
    }
    const double h = rho.h();
    return {{bx * h, by * h}, best_l1};
}

RearrangementResult asymmetry(const QuadrantField& rho) {
    if (!rho.is_nonnegative()) throw std::invalid_argument("asymmetry: negative values");
    const double mass = integral(rho);
    if (!(mass > 0.0)) throw std::invalid_argument("asymmetry: zero-mass field");
    RearrangementResult r;
    r.rho_star = radial_rearrangement(rho);
    const ShiftSearch s = best_translation(rho, r.rho_star);
    r.best_shift = s.shift;
    r.l1_distance = s.l1;
    r.delta = s.l1 / (2.0 * mass);
    return r;
}

double support_radius(const QuadrantField& rho_star) {
    const Vec2 c = rearrangement_center(rho_star.grid());
    double r = 0.0;
    for (int i = 0; i < rho_star.n(); ++i)
        for (int j = 0; j < rho_star.n(); ++j)
            if (rho_star.at(i, j) > 0.0) r = std::max(r, norm(rho_star.center(i, j) - c));
    return r + rho_star.h() * std::sqrt(0.5);
}

}  // namespace qv

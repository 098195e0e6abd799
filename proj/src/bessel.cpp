#include "quadvortex/bessel.hpp"

#include "quadvortex/parallel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace qv {

namespace {

constexpr double kSeriesLimit = 8.0;
constexpr int kMaxTerms = 60;

// sum_k (-1)^k (x/2)^(2k+m) / (k! (k+m)!)
double series(int m, double x) {
    const double half = 0.5 * x;
    const double q = half * half;
    double term = (m == 0) ? 1.0 : half;
    CompensatedSum sum;
    sum.add(term);
    for (int k = 1; k < kMaxTerms; ++k) {
        term *= -q / (static_cast<double>(k) * (k + m));
        sum.add(term);
        if (std::abs(term) < 1e-18 * (1.0 + std::abs(sum.value()))) break;
    }
    return sum.value();
}

// Miller's backward recurrence normalised by J_0 + 2 sum J_2k = 1.
double miller(int m, double x) {
    const int start = 2 * (static_cast<int>(x) + 30);
    double jp1 = 0.0;
    double j = 1e-300;
    double j0 = 0.0;
    double j1 = 0.0;
    double norm = 0.0;
    for (int k = start; k >= 1; --k) {
        const double jm1 = 2.0 * k / x * j - jp1;
        jp1 = j;
        j = jm1;
        if (std::abs(j) > 1e250) {
            jp1 *= 1e-250;
            j *= 1e-250;
            j1 *= 1e-250;
            norm *= 1e-250;
        }
        // j now holds J_{k-1}
        if (k - 1 == 1) j1 = j;
        if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * j;
    }
    j0 = j;
    norm += j0;
    return (m == 0 ? j0 : j1) / norm;
}

}  // namespace

double bessel_j(int order, double x) {
    if (order != 0 && order != 1)
        throw std::invalid_argument("bessel_j: unsupported order " + std::to_string(order));
    if (!(x >= 0.0)) throw std::invalid_argument("bessel_j: argument must be nonnegative");
    if (x > 50.0) throw std::invalid_argument("bessel_j: argument above supported range 50");
    if (x <= kSeriesLimit) return series(order, x);
    return miller(order, x);
}

RootResult find_c_l() {
    double lo = 3.5;
    double hi = 4.0;
    double flo = bessel_j(1, lo);
    RootResult r;
    double x = 0.5 * (lo + hi);
    for (int it = 1; it <= 100; ++it) {
        const double f = bessel_j(1, x);
        r.iterations = it;
        if (f == 0.0) {
            lo = hi = x;
            break;
        }
        if ((f < 0.0) == (flo < 0.0)) {
            lo = x;
            flo = f;
        } else {
            hi = x;
        }
        // J_1' = J_0 - J_1 / x
        const double df = bessel_j(0, x) - f / x;
        double next = x - f / df;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 1e-15 * x || hi - lo <= 4e-16 * x) {
            x = next;
            break;
        }
        x = next;
    }
    r.value = x;
    r.residual = bessel_j(1, x);
    if (!(std::abs(r.residual) <= 1e-12) || !(x > 3.8 && x < 3.9))
        throw std::runtime_error("find_c_l: root search did not converge");
    return r;
}

double c_l() {
    static const double value = find_c_l().value;
    return value;
}

}  // namespace qv

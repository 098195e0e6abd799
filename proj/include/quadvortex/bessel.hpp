#pragma once

namespace qv {

struct RootResult {
    double value = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

// J_0 or J_1 for 0 <= x <= 50, absolute error below 1e-12.
double bessel_j(int order, double x);

// First positive zero of J_1 (the Lamb constant c_L).
RootResult find_c_l();

// Cached value of find_c_l().value.
double c_l();

}  // namespace qv

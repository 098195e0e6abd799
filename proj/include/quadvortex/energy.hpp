#pragma once

#include "quadvortex/field.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace qv {

// Four-quadrant split of the odd-odd kernel for x, y in Q.
struct KernelSplit {
    double k1 = 0.0;  // -log|x - y|
    double k2 = 0.0;  //  log|x - y~|, y~ = (-y1, y2)
    double k3 = 0.0;  // -log|x + y|
    double k4 = 0.0;  //  log|x - y_|, y_ = (y1, -y2)
    double k234 = 0.0;
    double total = 0.0;
};

KernelSplit kernel_split(Vec2 x, Vec2 y);

// (1/4pi) log(1 + 4 x2 y2 / |x - y|^2)
double half_plane_green(Vec2 x, Vec2 y);

struct QuadratureInfo {
    int grid_n = 0;
    double h = 0.0;
    std::string rule = "midpoint+cell-self";
    bool under_resolved = false;  // support thinner than 8 cells
    std::size_t support_cells = 0;
};

// All energies use E[w] = -(1/2pi) int int w(x) w(y) log|x - y| over the plane
// for the odd-odd extension of rho. E_i are the plain quadrant double
// integrals of rho rho K_i.
struct EnergyReport {
    double e_total = 0.0;   // E of the odd-odd extension = (2/pi)(e1+e2+e3+e4)
    double e1 = 0.0;
    double e2 = 0.0;
    double e3 = 0.0;
    double e4 = 0.0;
    double e_dipole = 0.0;  // E of the right dipole = (e1+e4)/pi
    double e_inter = 0.0;   // -(e2+e3)/pi, so e_total = 2(e_dipole - e_inter)
    double e_hat = 0.0;     // e_dipole - (2/c_L^2) int_Q rho^2
    double l2sq = 0.0;      // int_Q rho^2
    QuadratureInfo quadrature;
};

// c0 in  int_C int_C -log|x-y| dx dy = h^4 (-log h + c0)  for a side-h square C.
double cell_self_constant();
// c1 in  int_C -log|x_c - y| dy = h^2 (-log h + c1)  with x_c the center of C.
double cell_point_constant();

EnergyReport energy_decompose(const QuadrantField& rho);

struct InteractionResult {
    double e_inter = 0.0;
    double bound = 0.0;  // mu^2 / (pi d^2)
    bool holds = true;
};

// Direct sum 2 int int rho(x) rho(y) G(x, y~). Throws when a support cell
// center lies left of d_hint.
InteractionResult interaction_energy(const QuadrantField& rho, double d_hint);

double phi(double s);
double g_h(double s, double H);

struct KernelBoundReport {
    std::uint64_t samples = 0;   // random draws
    std::uint64_t seam_points = 0;
    std::uint64_t violations = 0;
    double max_excess = 0.0;     // max of LHS - RHS over every evaluated pair
    Vec2 worst_x{};
    Vec2 worst_y{};
};

// LHS - RHS of  log(|x - y_|/|x - y|) <= phi(|x-y|) + g^H(2 x2) + 300/H.
double kernel_bound_excess(Vec2 x, Vec2 y, double H);
KernelBoundReport verify_kernel_bound(std::uint64_t samples, double H, std::uint64_t seed);

struct JensenResult {
    double lhs = 0.0;  // int rho g^H(2 x2) / mass
    double rhs = 0.0;  // g^H(2 X2 / mass)
};
JensenResult jensen_gap(const QuadrantField& rho, double H);

using RadialFn = std::function<double(double)>;

// inf over r in (0, 20 R*] of -w'(r)/r on a log-spaced grid.
double yy_constant(const RadialFn& dw, double r_star);

struct RadialPotential {
    RadialFn w;
    RadialFn dw;
    RadialFn self_cell;  // int_C int_C w(|x-y|) for a side-h square

    static RadialPotential log_potential();
    // self_cell by 2D midpoint quadrature of the cell autocorrelation.
    static RadialPotential from(RadialFn w, RadialFn dw);
};

// int int rho rho W(x - y) for rho read as a density on the plane.
double interaction_energy_w(const QuadrantField& rho, const RadialPotential& potential);

struct StabilityGap {
    double gap = 0.0;          // E_W[rho*] - E_W[rho]
    double lower_bound = 0.0;  // c ||rho||_1^3 / ||rho||_inf * delta^2
    double slack = 0.0;        // 10 h ||rho||_1^2
    double delta = 0.0;
    double r_star = 0.0;
    double c = 0.0;
    double e_w = 0.0;
    double e_w_star = 0.0;
};

StabilityGap stability_gap(const QuadrantField& rho, const RadialPotential& potential);

// |E[w] - E[w~]| against ||w-w~||_1^1/2 ||w-w~||_2^1/2 ||x2(w+w~)||_1^1/2 ||w+w~||_1^1/2,
// all over the plane for the odd-odd extensions of two fields on one grid.
struct EnergyDifferenceRatio {
    double diff = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;  // diff / rhs, 0 when rhs = 0
};
EnergyDifferenceRatio energy_difference_ratio(const QuadrantField& a, const QuadrantField& b);

}  // namespace qv

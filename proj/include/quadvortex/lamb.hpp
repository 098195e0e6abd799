#pragma once

#include "quadvortex/field.hpp"

namespace qv {

// omega_L^{a,b}(x) = b * omega_L(x / a).
struct LambParams {
    double a = 1.0;  // length scale
    double b = 1.0;  // amplitude scale

    double mu() const;     // a^3 b pi
    double kappa() const;  // (ab)^2 kappa_L
    double speed() const { return a * b; }

    // Inverse of (mu, kappa): the scale pair whose dipole has that impulse and
    // half-plane enstrophy.
    static LambParams from_mu_kappa(double mu, double kappa);
};

// Analytic kappa_L = pi c_L^2.
double kappa_l();

struct LambInvariants {
    double c_l = 0.0;
    double kappa_l = 0.0;  // numeric, radial quadrature
    double mu_l = 0.0;     // numeric, radial quadrature
    double energy = 0.0;   // numeric E[omega_L], grid double sum
    double speed = 1.0;

    double kappa_l_analytic = 0.0;
    double energy_analytic = 0.0;  // 4 kappa_L / c_L^2 = 4 pi
};

// g(r) = (-2 c_L / J_0(c_L)) J_1(c_L r) on [0, 1], zero beyond.
double lamb_profile(double r);

// Vorticity of the dipole centered at (center_x1, 0); odd in x2.
double lamb_vorticity(Vec2 x, const LambParams& params, double center_x1);

// mu_L and kappa_L by midpoint radial quadrature, mass of the upper half disk.
struct RadialLambIntegrals {
    double mass = 0.0;
    double mu = 0.0;
    double kappa = 0.0;
};
RadialLambIntegrals lamb_radial_integrals(int nodes = 512);

// Numeric invariants; the energy uses a grid_n x grid_n window of side
// domain_len holding the upper half of omega_L.
LambInvariants lamb_invariants(int grid_n, double domain_len, int radial_nodes = 512);

// Right dipole of omega_{L,d} restricted to Q and sampled on `grid`.
QuadrantField lamb_pair_field(double d, const LambParams& params, const GridSpec& grid);

// E_hat = E - (2 / c_L^2) int_{R^2_+} omega^2 with `energy` the half-plane
// dipole energy of the field.
double penalized_energy(const QuadrantField& field, double energy);

struct TranslationFit {
    double tau = 0.0;
    double residual = 0.0;  // ||field - omega_L(. - tau e1)||_{L1 cap L2 (Q)}
};

// Objective used by fit_translation.
double lamb_fit_objective(const QuadrantField& field, const LambParams& params, double tau);

// ||omega_L^{a,b} 1_Q||_{L1} + ||omega_L^{a,b} 1_Q||_{L2} for a dipole whose
// upper half lies in Q, from the radial integrals.
double lamb_reference_norm(const LambParams& params);

TranslationFit fit_translation(const QuadrantField& field_right, const LambParams& params);

}  // namespace qv

#pragma once

#include "quadvortex/field.hpp"

namespace qv {

struct RearrangementResult {
    QuadrantField rho_star;  // centered at the grid center
    double delta = 0.0;      // l1_distance / (2 mass)
    Vec2 best_shift{};       // a with rho ~ rho_star(. - a), length units
    double l1_distance = 0.0;
};

// Center used by radial_rearrangement: the geometric center of the window.
Vec2 rearrangement_center(const GridSpec& grid);

// Cell values sorted descending, assigned to cells ordered by distance from
// the window center (ties in row-major order).
QuadrantField radial_rearrangement(const QuadrantField& rho);

// ||rho - profile(. - a)||_{L1} with the profile translated by `shift`
// (length units, bilinear between cells). Profile mass pushed outside the
// window counts fully toward the distance.
double shifted_l1_distance(const QuadrantField& rho, const QuadrantField& profile, Vec2 shift);

struct ShiftSearch {
    Vec2 shift{};
    double l1 = 0.0;
};

// Integer-cell search in a +-window box around the center-of-mass offset,
// then golden-section refinement per axis. Ties go to the lexicographically
// smallest integer shift.
ShiftSearch best_translation(const QuadrantField& rho, const QuadrantField& profile,
                             int window = 8);

RearrangementResult asymmetry(const QuadrantField& rho);

// Radius of the smallest centered disk holding the support of a rearranged
// field (cell corners included).
double support_radius(const QuadrantField& rho_star);

}  // namespace qv

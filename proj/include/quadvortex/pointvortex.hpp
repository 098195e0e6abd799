#pragma once

#include "quadvortex/field.hpp"

#include <filesystem>
#include <vector>

namespace qv {

struct PVState {
    Vec2 z{};
    double t = 0.0;
};

struct OrbitInvariantValue {
    double i_value = 0.0;
};

// Velocity of a unit point vortex at z in Q with its three odd-odd images.
Vec2 pv_velocity(Vec2 z);

OrbitInvariantValue orbit_invariant(Vec2 z);
// Limit of z2 as z1 -> infinity along the orbit through p.
double orbit_asymptote(Vec2 p);

// K_234(z, z) = log(2 z1 z2 / |z|), the quadrant point-vortex Hamiltonian.
double pv_hamiltonian(Vec2 z);

// One classical RK4 step; dt may be negative (backward in time).
Vec2 pv_step(Vec2 z, double dt);

struct PVSample {
    double t = 0.0;
    Vec2 z{};
    double i_value = 0.0;
    double k234 = 0.0;
};

struct PVOptions {
    double dt = 1e-3;
    double t_end = 1.0;
    int sample_every = 1;  // keep every n-th step (first and last always kept)
    double stop_z1 = 0.0;  // stop early once z1 reaches this value (0: never)
    int max_halvings = 20;
};

// Fixed-step RK4. A step that would leave the open quadrant is retried with
// halved substeps; more than max_halvings halvings throws.
std::vector<PVSample> pv_integrate(Vec2 p, const PVOptions& options);

void write_trajectory_csv(const std::vector<PVSample>& samples, const std::filesystem::path& path);

}  // namespace qv

#pragma once

#include "quadvortex/energy.hpp"
#include "quadvortex/field.hpp"
#include "quadvortex/lamb.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qv {

struct BlobEnsemble {
    std::vector<Vec2> positions;
    std::vector<double> gammas;
    double blob_delta = 0.0;
    double t = 0.0;

    std::size_t size() const { return positions.size(); }
    double total_circulation() const;
};

// A particle reached an axis (or left the quadrant).
class BlobFault : public std::runtime_error {
public:
    BlobFault(std::size_t particle, double t, const std::string& what);
    std::size_t particle() const { return particle_; }
    double time() const { return time_; }

private:
    std::size_t particle_;
    double time_;
};

// blobs_per_cell must be a perfect square m^2; each occupied cell is split
// into an m x m lattice of equal blobs. blob_delta <= 0 selects 1.5 h / m.
BlobEnsemble discretize(const QuadrantField& rho, int blobs_per_cell = 1, double blob_delta = 0.0);

// Mollified velocity including the three odd-odd images of every particle.
std::vector<Vec2> ensemble_velocity(const BlobEnsemble& ens);
std::vector<Vec2> ensemble_velocity(const BlobEnsemble& ens, const std::vector<Vec2>& positions);

BlobEnsemble step(const BlobEnsemble& ens, double dt);

// Calls on_snapshot at every step index that is a multiple of `every`
// (including step 0); returns the final ensemble.
BlobEnsemble run(const BlobEnsemble& ens, double dt, double t_end, int every,
                 const std::function<void(const BlobEnsemble&, long)>& on_snapshot);

long step_count(double dt, double t_end);

// Cloud-in-cell deposition. Weight that would land in the half-cell rim
// outside the grid is folded into the edge cell.
QuadrantField deposit(const BlobEnsemble& ens, const GridSpec& grid);

void write_blobs(const BlobEnsemble& ens, const std::filesystem::path& path);
BlobEnsemble read_blobs(const std::filesystem::path& path);
std::string format_blobs(const BlobEnsemble& ens);
BlobEnsemble parse_blobs(const std::string& text);

struct DiagnosticsRow {
    double t = 0.0;
    double mass = 0.0;
    double x1 = 0.0;
    double x2 = 0.0;
    double mu = 0.0;
    EnergyReport energy;
    double delta_rearr = 0.0;
    double l1_dist_rho0star = 0.0;
    std::optional<double> tau_fit;
    double tau_residual = 0.0;
    QuadrantField field;  // deposit on the diagnostic window
};

// Scenario-local diagnostic window. The window keeps its size and follows the
// particle center of mass in whole cells of the initial lattice.
class Diagnostics {
public:
    Diagnostics(const BlobEnsemble& initial, const GridSpec& window,
                std::optional<LambParams> lamb = std::nullopt);

    DiagnosticsRow evaluate(const BlobEnsemble& ens) const;
    GridSpec window_for(const BlobEnsemble& ens) const;
    const QuadrantField& rho0_star() const { return rho0_star_; }

private:
    GridSpec window0_;
    Vec2 com0_{};
    QuadrantField rho0_star_;
    std::optional<LambParams> lamb_;
};

}  // namespace qv

#pragma once

#include "quadvortex/blobs.hpp"
#include "quadvortex/scenarios.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace qv {

extern const char* const kVersion;
extern const char* const kCsvHeader;

struct SimulationOptions {
    int snapshot_every = 10;  // rows between QFIELD/BLOBS snapshots (0: none)
    bool plots = true;
    bool quiet = true;
};

struct SimulationResult {
    std::vector<DiagnosticsRow> rows;  // fields are dropped after snapshotting
    std::vector<std::string> files;    // relative to the output directory
    std::size_t particles = 0;
    double blob_delta = 0.0;
};

std::string format_csv_row(const DiagnosticsRow& row);
std::string format_csv(const std::vector<DiagnosticsRow>& rows);

// Runs the scenario and writes diagnostics.csv, snapshots, plots and
// manifest.json into out_dir. The manifest is written before the run starts
// and rewritten when it ends (also on failure).
SimulationResult simulate(const ScenarioConfig& config, const std::filesystem::path& out_dir,
                          const SimulationOptions& options = {});

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

// Minimal line plot with axes, ticks and a legend.
std::string svg_plot(const std::string& title, const std::string& xlabel,
                     const std::vector<Series>& series);

struct SuiteResult {
    bool pass = true;
    std::vector<std::string> lines;       // summary
    std::vector<std::string> violations;  // one entry per failed check
};

SuiteResult suite_kernel_bound(std::uint64_t samples, double H, std::uint64_t seed);
SuiteResult suite_jensen(int fields, double H, std::uint64_t seed, double tol);
SuiteResult suite_riesz(int fields, int grid_n, std::uint64_t seed);
SuiteResult suite_orbit(Vec2 p, double t_end, double dt, double tol);
SuiteResult suite_scaling(int grid_n, double tol);

// Random nonnegative field: a few compact bumps inside a unit window at
// (1, 1), used by the Riesz and Jensen suites.
QuadrantField random_bump_field(int grid_n, std::uint64_t seed);

}  // namespace qv

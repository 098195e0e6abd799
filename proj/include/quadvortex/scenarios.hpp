#pragma once

#include "quadvortex/energy.hpp"
#include "quadvortex/field.hpp"
#include "quadvortex/lamb.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

namespace qv {

enum class ScenarioKind { lamb_pair, concentrated_patch, remark_example, custom_field };

std::string to_string(ScenarioKind kind);

struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::lamb_pair;
    Vec2 p{};
    double d = 0.0;
    double delta = 0.0;
    double A = 1.0;
    double epsilon = 0.0;
    double h0 = 0.0;
    double l0 = 0.0;
    int grid_n = 0;
    double domain_len = 0.0;
    int blobs_per_cell = 1;
    double dt = 0.0;
    double t_end = 0.0;
    int output_every = 1;
    std::uint64_t seed = 0;
    double blob_delta = 0.0;  // 0 selects the default 1.5 x sub-cell spacing
    std::string field_path;   // custom_field only

    // Every key as written in the source, in file order.
    std::map<std::string, std::string> raw;

    void validate() const;
};

class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, const std::string& what);
    int line() const { return line_; }  // 0 when not tied to a line

private:
    int line_;
};

// `key = value` lines, `#` comments. Throws ConfigError naming the offending
// line or the first missing key.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig read_config(const std::filesystem::path& path);

// Diagnostic window of the scenario at t = 0.
GridSpec scenario_window(const ScenarioConfig& config);

QuadrantField gen_lamb_pair(const ScenarioConfig& config);

enum class PatchShape { flat_disk, smooth_bump };

// Unit-mass patch inside B(p, delta) with sup <= A delta^-2, sampled on `grid`.
QuadrantField gen_concentrated_patch(Vec2 p, double delta, double A, const GridSpec& grid,
                                     PatchShape shape = PatchShape::flat_disk);
QuadrantField gen_concentrated_patch(const ScenarioConfig& config);

// Unit-mass radial bump (1 - r^2/R^2)^2 centered at (l0, h0), support within
// B((l0, h0), 1). Window of side domain_len centered on the bump.
QuadrantField gen_remark_example(double epsilon, double h0, double l0, int grid_n,
                                 double domain_len);
QuadrantField gen_remark_example(const ScenarioConfig& config);

QuadrantField generate(const ScenarioConfig& config);

struct AssumptionCheck {
    bool pass = false;
    double margin = 0.0;  // >= 0 exactly when the inequality holds
};

struct AssumptionReport {
    AssumptionCheck a1, a2, a3, a4;
    double lambda = 1.0;

    double mass = 0.0;
    double mass_defect = 0.0;  // |mass - 1|
    double sup = 0.0;
    double support_area = 0.0;
    double e1 = 0.0;
    double e1_star = 0.0;
    double x02 = 0.0;
    double x02_margin = 0.0;    // X02 - lambda / epsilon
    double e4_minus_log = 0.0;  // E4 - log(2 X02)
    double e23 = 0.0;           // E2 + E3
    EnergyReport energy;

    bool all_pass() const { return a1.pass && a2.pass && a3.pass && a4.pass; }
};

// lambda = 1 gives (a1)-(a4); other values give the rescaled variants.
AssumptionReport check_a1_a4(const QuadrantField& rho, double epsilon, double A,
                             double lambda = 1.0);

struct PropAssumptionReport {
    AssumptionReport report;       // a3/a4 are the rescaled variants
    bool hypotheses_hold = false;  // p1 > 8 p2 / eps and lambda < p2 eps / 4
    bool consistent = true;        // hypotheses imply a3 and a4
};

PropAssumptionReport check_prop_assumption(Vec2 p, double lambda, double epsilon,
                                           const QuadrantField& rho);

// Support area: cells above 1e-14 max|rho|, times h^2.
double support_area(const QuadrantField& rho);

// omega~(x) = lambda^2 omega(lambda x): sampled on the grid scaled by 1/lambda.
QuadrantField rescale_field(const QuadrantField& rho, double lambda);

}  // namespace qv

#include "quadvortex/scenarios.hpp"

#include "quadvortex/parallel.hpp"
#include "quadvortex/rearrange.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace qv {

namespace {

constexpr double kPi = std::numbers::pi;

// Canonical key order; missing keys are reported in this order.
const char* const kKeys[] = {"kind",     "p1",       "p2",         "d",          "delta",
                             "A",        "epsilon",  "h0",         "l0",         "grid_n",
                             "domain_len", "blobs_per_cell", "dt", "t_end",      "output_every",
                             "seed",     "blob_delta", "field_path"};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool required_for(const std::string& key, ScenarioKind kind) {
    static const char* const common[] = {"kind", "grid_n", "domain_len", "blobs_per_cell",
                                         "dt",   "t_end",  "output_every", "seed"};
    for (const char* k : common)
        if (key == k) return true;
    switch (kind) {
        case ScenarioKind::lamb_pair: return key == "d";
        case ScenarioKind::concentrated_patch:
            return key == "p1" || key == "p2" || key == "delta" || key == "A";
        case ScenarioKind::remark_example: return key == "epsilon" || key == "h0" || key == "l0";
        case ScenarioKind::custom_field: return key == "field_path";
    }
    return false;
}

ScenarioKind parse_kind(const std::string& v, int line) {
    if (v == "lamb_pair") return ScenarioKind::lamb_pair;
    if (v == "concentrated_patch") return ScenarioKind::concentrated_patch;
    if (v == "remark_example") return ScenarioKind::remark_example;
    if (v == "custom_field") return ScenarioKind::custom_field;
    throw ConfigError(line, "unknown kind '" + v + "'");
}

double as_double(const std::string& key, const std::string& v, int line) {
    double x = 0.0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(x))
        throw ConfigError(line, key + ": expected a number, got '" + v + "'");
    return x;
}

long long as_integer(const std::string& key, const std::string& v, int line) {
    long long x = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size())
        throw ConfigError(line, key + ": expected an integer, got '" + v + "'");
    return x;
}

// Fraction of a cell covered by a disk, by sub x sub point sampling.
double disk_coverage(const GridSpec& g, int i, int j, Vec2 c, double r, int sub) {
    const double h = g.h();
    const Vec2 corner = g.origin + Vec2{j * h, i * h};
    int hits = 0;
    for (int a = 0; a < sub; ++a)
        for (int b = 0; b < sub; ++b) {
            const Vec2 x = corner + Vec2{(b + 0.5) * h / sub, (a + 0.5) * h / sub};
            if (norm(x - c) < r) ++hits;
        }
    return static_cast<double>(hits) / (sub * sub);
}

QuadrantField normalized(QuadrantField f) {
    const double m = integral(f);
    if (!(m > 0.0)) throw std::invalid_argument("generated field has no mass on the grid");
    for (double& v : f.values()) v /= m;
    return f;
}

QuadrantField flat_disk(Vec2 p, double r, const GridSpec& grid) {
    QuadrantField f(grid);
    parallel_for(0, static_cast<std::size_t>(grid.n), [&](std::size_t row) {
        const int i = static_cast<int>(row);
        for (int j = 0; j < grid.n; ++j) f.at(i, j) = disk_coverage(grid, i, j, p, r, 8);
    });
    return normalized(std::move(f));
}

GridSpec centered_window(Vec2 c, int n, double len) {
    GridSpec g{n, len, {std::max(0.0, c.x1 - 0.5 * len), std::max(0.0, c.x2 - 0.5 * len)}};
    g.validate();
    return g;
}

}  // namespace

std::string to_string(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::lamb_pair: return "lamb_pair";
        case ScenarioKind::concentrated_patch: return "concentrated_patch";
        case ScenarioKind::remark_example: return "remark_example";
        case ScenarioKind::custom_field: return "custom_field";
    }
    return "unknown";
}

ConfigError::ConfigError(int line, const std::string& what)
    : std::runtime_error(line > 0 ? "config line " + std::to_string(line) + ": " + what
                                  : "config: " + what),
      line_(line) {}

void ScenarioConfig::validate() const {
    if (grid_n < 2) throw ConfigError(0, "grid_n must be at least 2");
    if (!(domain_len > 0.0)) throw ConfigError(0, "domain_len must be positive");
    if (blobs_per_cell < 1) throw ConfigError(0, "blobs_per_cell must be positive");
    if (!(dt > 0.0)) throw ConfigError(0, "dt must be positive");
    if (!(t_end >= 0.0)) throw ConfigError(0, "t_end must be nonnegative");
    if (output_every < 1) throw ConfigError(0, "output_every must be positive");
    if (blob_delta < 0.0) throw ConfigError(0, "blob_delta must be nonnegative");
    switch (kind) {
        case ScenarioKind::lamb_pair:
            if (!(d >= 1.0)) throw ConfigError(0, "lamb_pair requires d >= 1");
            break;
        case ScenarioKind::concentrated_patch:
            if (!(delta > 0.0) || !(A > 0.0))
                throw ConfigError(0, "concentrated_patch requires positive delta and A");
            if (!(p.x1 > 0.0) || !(p.x2 > 0.0))
                throw ConfigError(0, "concentrated_patch requires p in the open quadrant");
            break;
        case ScenarioKind::remark_example:
            if (!(epsilon > 0.0) || !(h0 > 0.0) || !(l0 > 0.0))
                throw ConfigError(0, "remark_example requires positive epsilon, h0, l0");
            break;
        case ScenarioKind::custom_field:
            if (field_path.empty()) throw ConfigError(0, "custom_field requires field_path");
            break;
    }
}

ScenarioConfig parse_config(const std::string& text) {
    ScenarioConfig c;
    std::map<std::string, int> lines;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(line_no, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys))
            throw ConfigError(line_no, "unknown key '" + key + "'");
        if (value.empty()) throw ConfigError(line_no, "empty value for '" + key + "'");
        if (lines.count(key)) throw ConfigError(line_no, "duplicate key '" + key + "'");
        lines[key] = line_no;
        c.raw[key] = value;
    }
    ScenarioKind kind = ScenarioKind::lamb_pair;
    if (c.raw.count("kind")) kind = parse_kind(c.raw["kind"], lines["kind"]);
    for (const char* key : kKeys) {
        if (!c.raw.count(key) && (std::string(key) == "kind" || required_for(key, kind)))
            throw ConfigError(0, "missing required key '" + std::string(key) + "'");
    }
    c.kind = kind;
    auto num = [&](const char* key, double& out) {
        if (c.raw.count(key)) out = as_double(key, c.raw[key], lines[key]);
    };
    auto integer = [&](const char* key, auto& out) {
        if (c.raw.count(key)) {
            const long long v = as_integer(key, c.raw[key], lines[key]);
            if (v < 0) throw ConfigError(lines[key], std::string(key) + " must be nonnegative");
            out = static_cast<std::remove_reference_t<decltype(out)>>(v);
        }
    };
    num("p1", c.p.x1);
    num("p2", c.p.x2);
    num("d", c.d);
    num("delta", c.delta);
    num("A", c.A);
    num("epsilon", c.epsilon);
    num("h0", c.h0);
    num("l0", c.l0);
    integer("grid_n", c.grid_n);
    num("domain_len", c.domain_len);
    integer("blobs_per_cell", c.blobs_per_cell);
    num("dt", c.dt);
    num("t_end", c.t_end);
    integer("output_every", c.output_every);
    integer("seed", c.seed);
    num("blob_delta", c.blob_delta);
    if (c.raw.count("field_path")) c.field_path = c.raw["field_path"];
    c.validate();
    return c;
}

ScenarioConfig read_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(0, "cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    ScenarioConfig c = parse_config(buf.str());
    if (c.kind == ScenarioKind::custom_field && std::filesystem::path(c.field_path).is_relative())
        c.field_path = (path.parent_path() / c.field_path).string();
    return c;
}

GridSpec scenario_window(const ScenarioConfig& c) {
    switch (c.kind) {
        case ScenarioKind::lamb_pair: {
            GridSpec g{c.grid_n, c.domain_len, {std::max(0.0, c.d - 0.5 * c.domain_len), 0.0}};
            g.validate();
            return g;
        }
        case ScenarioKind::concentrated_patch: return centered_window(c.p, c.grid_n, c.domain_len);
        case ScenarioKind::remark_example:
            return centered_window({c.l0, c.h0}, c.grid_n, c.domain_len);
        case ScenarioKind::custom_field: return read_field(c.field_path).grid();
    }
    throw std::logic_error("unhandled scenario kind");
}

QuadrantField gen_lamb_pair(const ScenarioConfig& c) {
    if (!(c.d >= 1.0)) throw std::invalid_argument("gen_lamb_pair: d must be at least 1");
    // The diagnostic window follows the dipole, so the margin is needed
    // around the support rather than along the whole path.
    if (c.domain_len < 2.5)
        throw std::invalid_argument(
            "gen_lamb_pair: insufficient domain, domain_len must be at least 2.5 (support "
            "diameter plus margin)");
    return lamb_pair_field(c.d, LambParams{}, scenario_window(c));
}

QuadrantField gen_concentrated_patch(Vec2 p, double delta, double A, const GridSpec& grid,
                                     PatchShape shape) {
    if (!(delta > 0.0) || !(A > 0.0))
        throw std::invalid_argument("gen_concentrated_patch: delta and A must be positive");
    if (!(p.x1 > delta) || !(p.x2 > delta))
        throw std::invalid_argument("gen_concentrated_patch: ball B(p, delta) escapes Q");
    const double cap = A / (delta * delta);
    if (shape == PatchShape::smooth_bump) {
        // (1 - r^2/R^2)^2 has sup 3/(pi R^2) at unit mass
        const double r = std::max(delta * std::sqrt(3.0 / (kPi * A)), 0.5 * delta);
        if (r > delta)
            throw std::invalid_argument("gen_concentrated_patch: A too small for a bump in B(p, delta)");
        QuadrantField f = field_from_fn(
            [&](Vec2 x) {
                const double s = 1.0 - (norm(x - p) / r) * (norm(x - p) / r);
                return s > 0.0 ? s * s : 0.0;
            },
            grid);
        f = normalized(std::move(f));
        if (f.max_value() > cap)
            throw std::invalid_argument("gen_concentrated_patch: grid too coarse for the sup bound");
        return f;
    }
    double r = std::max(delta / std::sqrt(kPi), delta / std::sqrt(kPi * A));
    if (r > delta)
        throw std::invalid_argument("gen_concentrated_patch: A too small for a disk in B(p, delta)");
    QuadrantField f = flat_disk(p, r, grid);
    if (f.max_value() > cap) {
        // the discrete disk is slightly smaller than pi r^2; grow r until the cap holds
        double lo = r, hi = delta;
        if (flat_disk(p, hi, grid).max_value() > cap)
            throw std::invalid_argument("gen_concentrated_patch: grid too coarse for the sup bound");
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (flat_disk(p, mid, grid).max_value() > cap) lo = mid;
            else hi = mid;
        }
        f = flat_disk(p, hi, grid);
    }
    return f;
}

QuadrantField gen_concentrated_patch(const ScenarioConfig& c) {
    return gen_concentrated_patch(c.p, c.delta, c.A, scenario_window(c));
}

QuadrantField gen_remark_example(double epsilon, double h0, double l0, int grid_n,
                                 double domain_len) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("gen_remark_example: epsilon must be positive");
    if (h0 < 2.0 / epsilon)
        throw std::invalid_argument("gen_remark_example: requires h0 >= 2/epsilon");
    if (l0 < 2.0 * h0 / epsilon)
        throw std::invalid_argument("gen_remark_example: requires l0 >= 2 h0/epsilon");
    if (domain_len < 2.0)
        throw std::invalid_argument("gen_remark_example: domain_len must hold the unit disk");
    const Vec2 p{l0, h0};
    const GridSpec g = centered_window(p, grid_n, domain_len);
    // cell centers within R keep whole cells inside B(p, 1)
    const double R = 1.0 - g.h() * std::sqrt(0.5);
    QuadrantField f = field_from_fn(
        [&](Vec2 x) {
            const double q = norm(x - p) / R;
            const double s = 1.0 - q * q;
            return s > 0.0 ? s * s : 0.0;
        },
        g);
    return normalized(std::move(f));
}

QuadrantField gen_remark_example(const ScenarioConfig& c) {
    return gen_remark_example(c.epsilon, c.h0, c.l0, c.grid_n, c.domain_len);
}

QuadrantField generate(const ScenarioConfig& c) {
    switch (c.kind) {
        case ScenarioKind::lamb_pair: return gen_lamb_pair(c);
        case ScenarioKind::concentrated_patch: return gen_concentrated_patch(c);
        case ScenarioKind::remark_example: return gen_remark_example(c);
        case ScenarioKind::custom_field: return read_field(c.field_path);
    }
    throw std::logic_error("unhandled scenario kind");
}

double support_area(const QuadrantField& rho) {
    double mx = 0.0;
    for (double v : rho.values()) mx = std::max(mx, std::abs(v));
    if (mx == 0.0) return 0.0;
    const double thr = 1e-14 * mx;
    std::size_t count = 0;
    for (double v : rho.values())
        if (std::abs(v) > thr) ++count;
    return static_cast<double>(count) * rho.cell_area();
}

AssumptionReport check_a1_a4(const QuadrantField& rho, double epsilon, double A, double lambda) {
    if (!rho.is_nonnegative()) throw std::invalid_argument("check_a1_a4: negative values");
    AssumptionReport r;
    r.lambda = lambda;
    const Moments m = moments(rho);
    r.mass = m.mass;
    r.mass_defect = std::abs(m.mass - 1.0);
    r.sup = rho.max_value();
    r.support_area = support_area(rho);
    const double sup_margin = A / (lambda * lambda) - r.sup;
    const double area_margin = kPi * lambda * lambda - r.support_area;
    r.a1.margin = std::min({sup_margin, area_margin, -r.mass_defect});
    r.a1.pass = r.mass_defect <= 1e-9 && sup_margin >= 0.0 && area_margin >= 0.0;

    if (m.mass > 0.0) {
        r.energy = energy_decompose(rho);
        r.e1 = r.energy.e1;
        r.e1_star = interaction_energy_w(radial_rearrangement(rho), RadialPotential::log_potential());
        r.x02 = m.x2;
        r.e4_minus_log = r.energy.e4 - std::log(2.0 * r.x02);
        r.e23 = r.energy.e2 + r.energy.e3;
        r.a2.margin = r.e1 - r.e1_star + epsilon;
        r.a2.pass = r.a2.margin >= 0.0;
        const double height = r.x02 - lambda / epsilon;
        r.x02_margin = height;
        const double e4m = r.e4_minus_log + epsilon;
        r.a3.margin = std::min(height, e4m);
        r.a3.pass = height > 0.0 && e4m >= 0.0;
        r.a4.margin = r.e23 + epsilon;
        r.a4.pass = r.a4.margin >= 0.0;
    } else {
        r.a2.margin = r.a3.margin = r.a4.margin = -std::numeric_limits<double>::infinity();
        r.x02_margin = -std::numeric_limits<double>::infinity();
    }
    return r;
}

PropAssumptionReport check_prop_assumption(Vec2 p, double lambda, double epsilon,
                                           const QuadrantField& rho) {
    for (int i = 0; i < rho.n(); ++i)
        for (int j = 0; j < rho.n(); ++j)
            if (rho.at(i, j) != 0.0 && norm(rho.center(i, j) - p) >= lambda)
                throw std::invalid_argument("check_prop_assumption: support leaves B(p, lambda)");
    PropAssumptionReport out;
    out.report = check_a1_a4(rho, epsilon, 1.0, lambda);
    out.hypotheses_hold = p.x1 > 8.0 * p.x2 / epsilon && lambda < 0.25 * p.x2 * epsilon;
    out.consistent = !out.hypotheses_hold || (out.report.a3.pass && out.report.a4.pass);
    return out;
}

QuadrantField rescale_field(const QuadrantField& rho, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("rescale_field: lambda must be positive");
    GridSpec g = rho.grid();
    g.length /= lambda;
    g.origin = (1.0 / lambda) * g.origin;
    std::vector<double> v = rho.values();
    for (double& x : v) x *= lambda * lambda;
    return QuadrantField(g, std::move(v));
}

}  // namespace qv

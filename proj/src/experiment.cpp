#include "quadvortex/experiment.hpp"

#include "quadvortex/energy.hpp"
#include "quadvortex/pointvortex.hpp"
#include "quadvortex/rearrange.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <random>

namespace qv {

const char* const kVersion = "quadvortex 0.3.0";
const char* const kCsvHeader =
    "t,mass,X1,X2,mu,E,E1,E2,E3,E4,E_inter,E_hat,L2sq,delta_rearr,l1_dist_rho0star,tau_fit";

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string short_fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string now_iso() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

struct Manifest {
    nlohmann::ordered_json j;
    fs::path path;

    void save() const { write_text(path, j.dump(2) + "\n"); }
};

}  // namespace

std::string format_csv_row(const DiagnosticsRow& r) {
    const EnergyReport& e = r.energy;
    std::string s;
    for (double v : {r.t, r.mass, r.x1, r.x2, r.mu, e.e_total, e.e1, e.e2, e.e3, e.e4, e.e_inter,
                     e.e_hat, e.l2sq, r.delta_rearr, r.l1_dist_rho0star}) {
        s += fmt(v);
        s += ',';
    }
    if (r.tau_fit) s += fmt(*r.tau_fit);
    return s;
}

std::string format_csv(const std::vector<DiagnosticsRow>& rows) {
    std::string s = kCsvHeader;
    s += '\n';
    for (const auto& r : rows) {
        s += format_csv_row(r);
        s += '\n';
    }
    return s;
}

std::string svg_plot(const std::string& title, const std::string& xlabel,
                     const std::vector<Series>& series) {
    const double W = 640, H = 400, L = 70, R = 20, T = 40, B = 50;
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series)
        for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
            if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
            x0 = std::min(x0, s.x[k]);
            x1 = std::max(x1, s.x[k]);
            y0 = std::min(y0, s.y[k]);
            y1 = std::max(y1, s.y[k]);
        }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) {
        const double pad = std::max(1e-12, std::abs(y0) * 1e-6);
        y0 -= pad;
        y1 += pad;
    }
    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    std::string o;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" "
                  "font-family=\"sans-serif\" font-size=\"11\">\n",
                  W, H);
    o += buf;
    o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"20\" font-size=\"14\">%s</text>\n", L,
                  title.c_str());
    o += buf;
    std::snprintf(buf, sizeof buf,
                  "<path d=\"M%g %g L%g %g L%g %g\" stroke=\"black\" fill=\"none\"/>\n", L, T, L,
                  H - B, W - R, H - B);
    o += buf;
    for (int k = 0; k <= 4; ++k) {
        const double xv = x0 + (x1 - x0) * k / 4.0;
        const double yv = y0 + (y1 - y0) * k / 4.0;
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%g\" y=\"%g\" text-anchor=\"middle\">%s</text>\n", px(xv),
                      H - B + 16, short_fmt(xv).c_str());
        o += buf;
        std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" text-anchor=\"end\">%s</text>\n",
                      L - 4, py(yv) + 4, short_fmt(yv).c_str());
        o += buf;
    }
    std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" text-anchor=\"middle\">%s</text>\n",
                  (L + W - R) / 2, H - 12, xlabel.c_str());
    o += buf;
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* c = colors[s % 6];
        std::string d;
        bool pen = false;
        for (std::size_t k = 0; k < series[s].x.size() && k < series[s].y.size(); ++k) {
            const double xv = series[s].x[k], yv = series[s].y[k];
            if (!std::isfinite(xv) || !std::isfinite(yv)) {
                pen = false;
                continue;
            }
            std::snprintf(buf, sizeof buf, "%s%.2f %.2f ", pen ? "L" : "M", px(xv), py(yv));
            d += buf;
            pen = true;
        }
        if (!d.empty()) {
            o += "<path d=\"" + d + "\" stroke=\"" + c + "\" fill=\"none\" stroke-width=\"1.5\"/>\n";
        }
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%g\" y=\"%g\" fill=\"%s\">%s</text>\n", W - R - 120,
                      T + 14.0 * (s + 1), c, series[s].name.c_str());
        o += buf;
    }
    o += "</svg>\n";
    return o;
}

SimulationResult simulate(const ScenarioConfig& config, const fs::path& out_dir,
                          const SimulationOptions& options) {
    config.validate();
    fs::create_directories(out_dir);
    Manifest man;
    man.path = out_dir / "manifest.json";
    man.j["version"] = kVersion;
    man.j["status"] = "running";
    man.j["start_time"] = now_iso();
    man.j["end_time"] = nullptr;
    man.j["seed"] = config.seed;
    nlohmann::ordered_json cfg;
    for (const auto& [k, v] : config.raw) cfg[k] = v;
    man.j["config"] = cfg;
    man.j["files"] = nlohmann::json::array();
    man.save();

    SimulationResult result;
    try {
        const QuadrantField rho0 = generate(config);
        const BlobEnsemble ens0 = discretize(rho0, config.blobs_per_cell, config.blob_delta);
        result.particles = ens0.size();
        result.blob_delta = ens0.blob_delta;
        std::optional<LambParams> lamb;
        if (config.kind == ScenarioKind::lamb_pair) lamb = LambParams{};
        const Diagnostics diag(ens0, rho0.grid(), lamb);
        man.j["particles"] = ens0.size();
        man.j["blob_delta"] = ens0.blob_delta;
        man.save();

        const long steps = step_count(config.dt, config.t_end);
        const long last_row = steps / config.output_every;
        long row_index = 0;
        run(ens0, config.dt, config.t_end, config.output_every,
            [&](const BlobEnsemble& e, long) {
                DiagnosticsRow row = diag.evaluate(e);
                const bool snap = options.snapshot_every > 0 &&
                                  (row_index % options.snapshot_every == 0 || row_index == last_row);
                if (snap) {
                    char name[64];
                    std::snprintf(name, sizeof name, "snap_%06ld", row_index);
                    write_field(row.field, out_dir / (std::string(name) + ".qfield"));
                    write_blobs(e, out_dir / (std::string(name) + ".blobs"));
                    result.files.push_back(std::string(name) + ".qfield");
                    result.files.push_back(std::string(name) + ".blobs");
                }
                if (!options.quiet)
                    std::fprintf(stderr, "t=%.4f delta=%.4f E=%.6f\n", row.t, row.delta_rearr,
                                 row.energy.e_total);
                row.field = QuadrantField();
                result.rows.push_back(std::move(row));
                ++row_index;
            });

        write_text(out_dir / "diagnostics.csv", format_csv(result.rows));
        result.files.insert(result.files.begin(), "diagnostics.csv");

        if (options.plots) {
            Series x1{"X1", {}, {}}, x2{"X2", {}, {}}, dr{"delta_rearr", {}, {}},
                tau{"tau_fit", {}, {}};
            Series e{"E", {}, {}}, e1{"E1", {}, {}}, e2{"E2", {}, {}}, e3{"E3", {}, {}},
                e4{"E4", {}, {}}, ei{"E_inter", {}, {}};
            for (const auto& r : result.rows) {
                for (Series* s : {&x1, &x2, &dr, &tau, &e, &e1, &e2, &e3, &e4, &ei})
                    s->x.push_back(r.t);
                x1.y.push_back(r.x1);
                x2.y.push_back(r.x2);
                dr.y.push_back(r.delta_rearr);
                tau.y.push_back(r.tau_fit ? *r.tau_fit : std::nan(""));
                e.y.push_back(r.energy.e_total);
                e1.y.push_back(r.energy.e1);
                e2.y.push_back(r.energy.e2);
                e3.y.push_back(r.energy.e3);
                e4.y.push_back(r.energy.e4);
                ei.y.push_back(r.energy.e_inter);
            }
            const std::pair<std::string, std::string> plots[] = {
                {"plot_X1.svg", svg_plot("X1 (int_Q x1 rho)", "t", {x1})},
                {"plot_X2.svg", svg_plot("X2 (int_Q x2 rho)", "t", {x2})},
                {"plot_delta_rearr.svg", svg_plot("asymmetry delta", "t", {dr})},
                {"plot_energy.svg", svg_plot("energies", "t", {e, e1, e2, e3, e4, ei})},
            };
            for (const auto& [name, svg] : plots) {
                write_text(out_dir / name, svg);
                result.files.push_back(name);
            }
            if (lamb) {
                write_text(out_dir / "plot_tau_fit.svg", svg_plot("tau fit", "t", {tau}));
                result.files.push_back("plot_tau_fit.svg");
            }
        }
    } catch (const std::exception& ex) {
        man.j["status"] = "failed";
        man.j["error"] = ex.what();
        man.j["end_time"] = now_iso();
        man.j["rows"] = result.rows.size();
        man.j["files"] = result.files;
        man.save();
        throw;
    }
    man.j["status"] = "complete";
    man.j["end_time"] = now_iso();
    man.j["rows"] = result.rows.size();
    man.j["files"] = result.files;
    man.save();
    return result;
}

namespace {

QuadrantField random_bumps(const GridSpec& g, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int count = 1 + static_cast<int>(gen() % 4);
    struct Bump {
        Vec2 c;
        double r, amp;
        bool flat;
    };
    std::vector<Bump> bumps;
    for (int k = 0; k < count; ++k) {
        Bump b;
        b.c = g.origin + Vec2{(0.3 + 0.4 * u(gen)) * g.length, (0.3 + 0.4 * u(gen)) * g.length};
        b.r = (0.05 + 0.1 * u(gen)) * g.length;
        b.amp = 0.5 + 1.5 * u(gen);
        b.flat = u(gen) < 0.5;
        bumps.push_back(b);
    }
    return field_from_fn(
        [&](Vec2 x) {
            double v = 0.0;
            for (const auto& b : bumps) {
                const double q = norm(x - b.c) / b.r;
                if (q >= 1.0) continue;
                v += b.flat ? b.amp : b.amp * (1.0 - q * q) * (1.0 - q * q);
            }
            return v;
        },
        g);
}

}  // namespace

QuadrantField random_bump_field(int grid_n, std::uint64_t seed) {
    return random_bumps(GridSpec{grid_n, 1.0, {1.0, 1.0}}, seed);
}

SuiteResult suite_kernel_bound(std::uint64_t samples, double H, std::uint64_t seed) {
    const KernelBoundReport rep = verify_kernel_bound(samples, H, seed);
    SuiteResult s;
    s.pass = rep.violations == 0;
    s.lines.push_back("H=" + short_fmt(H) + " samples=" + std::to_string(rep.samples) +
                      " seam_points=" + std::to_string(rep.seam_points) +
                      " violations=" + std::to_string(rep.violations) +
                      " max_excess=" + short_fmt(rep.max_excess));
    if (!s.pass)
        s.violations.push_back("worst pair x=(" + fmt(rep.worst_x.x1) + "," + fmt(rep.worst_x.x2) +
                               ") y=(" + fmt(rep.worst_y.x1) + "," + fmt(rep.worst_y.x2) +
                               ") excess=" + fmt(rep.max_excess));
    return s;
}

SuiteResult suite_jensen(int fields, double H, std::uint64_t seed, double tol) {
    SuiteResult s;
    double worst = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < fields; ++k) {
        // window straddling 2 x2 = H so both branches of g^H are sampled
        const GridSpec g{64, 0.5 * H, {1.0, 0.25 * H}};
        const QuadrantField rho = random_bumps(g, seed + k);
        const JensenResult j = jensen_gap(rho, H);
        worst = std::max(worst, j.lhs - j.rhs);
        if (!(j.lhs <= j.rhs + tol)) {
            s.pass = false;
            s.violations.push_back("field " + std::to_string(k) + ": lhs=" + fmt(j.lhs) +
                                   " rhs=" + fmt(j.rhs));
        }
    }
    s.lines.push_back("fields=" + std::to_string(fields) + " H=" + short_fmt(H) +
                      " max(lhs-rhs)=" + short_fmt(worst));
    return s;
}

SuiteResult suite_riesz(int fields, int grid_n, std::uint64_t seed) {
    SuiteResult s;
    const RadialPotential w = RadialPotential::log_potential();
    double min_riesz = std::numeric_limits<double>::infinity();
    double min_stab = std::numeric_limits<double>::infinity();
    for (int k = 0; k < fields; ++k) {
        const QuadrantField rho = random_bump_field(grid_n, seed + k);
        const StabilityGap g = stability_gap(rho, w);
        const double riesz = g.e_w_star - g.e_w + g.slack;
        const double stab = g.gap - g.lower_bound + g.slack;
        min_riesz = std::min(min_riesz, riesz);
        min_stab = std::min(min_stab, stab);
        if (riesz < 0.0 || stab < 0.0) {
            s.pass = false;
            s.violations.push_back("field " + std::to_string(k) + ": gap=" + fmt(g.gap) +
                                   " lower_bound=" + fmt(g.lower_bound) + " slack=" + fmt(g.slack) +
                                   " delta=" + fmt(g.delta));
        }
    }
    s.lines.push_back("fields=" + std::to_string(fields) + " n=" + std::to_string(grid_n) +
                      " min(E1*-E1+slack)=" + short_fmt(min_riesz) +
                      " min(gap-bound+slack)=" + short_fmt(min_stab));
    return s;
}

SuiteResult suite_orbit(Vec2 p, double t_end, double dt, double tol) {
    SuiteResult s;
    const double i0 = orbit_invariant(p).i_value;
    const double k0 = pv_hamiltonian(p);
    double max_k_gap = 0.0;
    for (double q1 : {2.5, 3.0, 3.5, 4.0, 5.0, 6.0, 8.0, 10.0, 20.0, 100.0}) {
        if (q1 * q1 <= i0) continue;
        const double q2 = std::sqrt(i0 * q1 * q1 / (q1 * q1 - i0));
        const Vec2 q{q1, q2};
        const double k = std::log(2.0 * q.x1) - std::log(2.0 * norm(q)) + std::log(2.0 * q.x2);
        max_k_gap = std::max(max_k_gap, std::abs(k - k0));
    }
    if (max_k_gap > 1e-12) {
        s.pass = false;
        s.violations.push_back("K234 differs across analytic orbit points by " + fmt(max_k_gap));
    }
    PVOptions o;
    o.dt = dt;
    o.t_end = t_end;
    o.sample_every = 1;
    const auto traj = pv_integrate(p, o);
    double di = 0.0, dk = 0.0;
    for (const auto& smp : traj) {
        di = std::max(di, std::abs(smp.i_value - i0) / i0);
        dk = std::max(dk, std::abs(smp.k234 - k0) / std::abs(k0));
    }
    if (di > tol || dk > tol) {
        s.pass = false;
        s.violations.push_back("invariant drift i_value=" + fmt(di) + " k234=" + fmt(dk));
    }
    s.lines.push_back("p=(" + short_fmt(p.x1) + "," + short_fmt(p.x2) + ") steps=" +
                      std::to_string(traj.size() - 1) + " drift_i=" + short_fmt(di) +
                      " drift_k234=" + short_fmt(dk) + " analytic_k234_gap=" + short_fmt(max_k_gap));
    return s;
}

SuiteResult suite_scaling(int grid_n, double tol) {
    SuiteResult s;
    auto dipole_energy = [&](LambParams p) {
        const double len = 2.5 * p.a;
        const GridSpec g{grid_n, len, {}};
        return energy_decompose(lamb_pair_field(0.5 * len, p, g)).e_dipole;
    };
    const double e_ref = dipole_energy(LambParams{});
    for (auto [a, b] : {std::pair{2.0, 0.5}, std::pair{0.5, 2.0}}) {
        const double ratio = dipole_energy(LambParams{a, b}) / e_ref;
        const double expect = a * a * a * a * b * b;
        const double rel = std::abs(ratio / expect - 1.0);
        s.lines.push_back("a=" + short_fmt(a) + " b=" + short_fmt(b) + " ratio=" + fmt(ratio) +
                          " expected=" + short_fmt(expect));
        if (rel > tol) {
            s.pass = false;
            s.violations.push_back("energy scaling off by " + fmt(rel));
        }
    }
    // E_i[lambda^2 rho(lambda .)] = E_i[rho] +/- log lambda at unit mass
    const QuadrantField rho = gen_remark_example(0.5, 4.0, 16.0, grid_n, 2.5);
    const EnergyReport e0 = energy_decompose(rho);
    for (double lambda : {0.5, 0.1}) {
        const EnergyReport e = energy_decompose(rescale_field(rho, lambda));
        const double l = std::log(lambda);
        const double gaps[] = {e.e1 - (e0.e1 + l), e.e2 - (e0.e2 - l), e.e3 - (e0.e3 + l),
                               e.e4 - (e0.e4 - l)};
        double worst = 0.0;
        for (double g : gaps) worst = std::max(worst, std::abs(g));
        s.lines.push_back("lambda=" + short_fmt(lambda) + " max|E_i - (E_i +/- log lambda)|=" +
                          short_fmt(worst));
        if (worst > 1e-9) {
            s.pass = false;
            s.violations.push_back("rescaling identity off by " + fmt(worst));
        }
    }
    return s;
}

}  // namespace qv

#include "quadvortex/bessel.hpp"
#include "quadvortex/experiment.hpp"
#include "quadvortex/lamb.hpp"
#include "quadvortex/parallel.hpp"
#include "quadvortex/pointvortex.hpp"
#include "quadvortex/rearrange.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <numbers>

namespace {

enum Exit { kOk = 0, kViolation = 1, kUsage = 2, kFailure = 3 };

qv::Vec2 parse_point(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) throw CLI::ValidationError("--p", "expected x,y");
    try {
        return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
    } catch (const std::exception&) {
        throw CLI::ValidationError("--p", "expected x,y");
    }
}

int report(const std::string& name, const qv::SuiteResult& r) {
    for (const auto& l : r.lines) std::printf("%s: %s\n", name.c_str(), l.c_str());
    for (const auto& v : r.violations) std::printf("%s: VIOLATION %s\n", name.c_str(), v.c_str());
    std::printf("%s: %s\n", name.c_str(), r.pass ? "pass" : "FAIL");
    return r.pass ? kOk : kViolation;
}

int lamb_info(int n, double len, int nodes) {
    const qv::LambInvariants inv = qv::lamb_invariants(n, len, nodes);
    const double pi = std::numbers::pi;
    std::printf("%-10s %22s %22s\n", "quantity", "numeric", "analytic");
    std::printf("%-10s %22.15f %22s\n", "c_L", inv.c_l, "-");
    std::printf("%-10s %22.15f %22.15f\n", "mu_L", inv.mu_l, pi);
    std::printf("%-10s %22.15f %22.15f\n", "kappa_L", inv.kappa_l, inv.kappa_l_analytic);
    std::printf("%-10s %22.15f %22.15f\n", "E", inv.energy, inv.energy_analytic);
    std::printf("%-10s %22.15f %22.15f\n", "speed", inv.speed, 1.0);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Odd-odd vortex laboratory: Lamb dipoles, quadrant point vortices, blob runs"};
    app.require_subcommand(1);
    app.fallthrough();
    unsigned workers = 1;
    app.add_option("--workers", workers, "worker threads (results do not depend on it)")
        ->check(CLI::Range(1u, 1024u));

    auto* info = app.add_subcommand("lamb-info", "print Lamb dipole invariants");
    int info_n = 256;
    double info_len = 2.5;
    int info_nodes = 512;
    info->add_option("--grid-n", info_n, "cells per side for the energy");
    info->add_option("--domain-len", info_len, "window side for the energy");
    info->add_option("--radial-nodes", info_nodes, "radial quadrature nodes");

    auto* verify = app.add_subcommand("verify", "run a property suite");
    verify->require_subcommand(1);
    std::uint64_t samples = 1000000, seed = 7;
    double H = 301.0, tol = 1e-6;
    int fields = 100, grid_n = 128;
    std::string p_text = "3,4";
    double t_end = 100.0, dt = 1e-3;

    auto* kb = verify->add_subcommand("kernel-bound", "pointwise kernel bound on random pairs");
    kb->add_option("--samples", samples);
    kb->add_option("--H", H);
    kb->add_option("--seed", seed);

    auto* jn = verify->add_subcommand("jensen", "Jensen inequality for g^H on random fields");
    jn->add_option("--fields", fields);
    jn->add_option("--H", H);
    jn->add_option("--seed", seed);
    jn->add_option("--tol", tol);

    auto* rz = verify->add_subcommand("riesz", "Riesz and stability-gap suite");
    rz->add_option("--fields", fields);
    rz->add_option("--seed", seed);
    rz->add_option("--n", grid_n, "cells per side");

    auto* ob = verify->add_subcommand("orbit", "point-vortex invariant conservation");
    double orbit_tol = 1e-8;
    ob->add_option("--p", p_text, "start point x,y");
    ob->add_option("--t-end", t_end);
    ob->add_option("--dt", dt);
    ob->add_option("--tol", orbit_tol);

    auto* sc = verify->add_subcommand("scaling", "energy scaling and rescaling identities");
    int scale_n = 128;
    double scale_tol = 0.01;
    sc->add_option("--n", scale_n, "cells per side");
    sc->add_option("--tol", scale_tol);

    auto* pv = app.add_subcommand("pv", "point-vortex tools");
    pv->require_subcommand(1);
    auto* orbit = pv->add_subcommand("orbit", "integrate a quadrant point vortex");
    std::string pv_p = "3,4", pv_out = "trajectory.csv";
    double pv_dt = 1e-3, pv_t_end = 100.0;
    int pv_every = 100;
    orbit->add_option("--p", pv_p, "start point x,y");
    orbit->add_option("--dt", pv_dt);
    orbit->add_option("--t-end", pv_t_end);
    orbit->add_option("--every", pv_every, "keep every n-th step");
    orbit->add_option("--out", pv_out, "trajectory CSV path");

    auto* sim = app.add_subcommand("simulate", "run a blob simulation scenario");
    std::string config_path, out_dir;
    qv::SimulationOptions sim_opts;
    bool no_plots = false, verbose = false;
    sim->add_option("--config", config_path)->required();
    sim->add_option("--out", out_dir)->required();
    sim->add_option("--snapshot-every", sim_opts.snapshot_every, "CSV rows between snapshots");
    sim->add_flag("--no-plots", no_plots);
    sim->add_flag("--verbose", verbose);

    auto* re = app.add_subcommand("rearrange", "radial rearrangement of a QFIELD file");
    std::string in_path, re_out;
    re->add_option("--in", in_path)->required();
    re->add_option("--out", re_out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }
    qv::set_workers(workers);

    try {
        if (info->parsed()) return lamb_info(info_n, info_len, info_nodes);
        if (kb->parsed()) return report("kernel-bound", qv::suite_kernel_bound(samples, H, seed));
        if (jn->parsed()) return report("jensen", qv::suite_jensen(fields, H, seed, tol));
        if (rz->parsed()) return report("riesz", qv::suite_riesz(fields, grid_n, seed));
        if (ob->parsed())
            return report("orbit", qv::suite_orbit(parse_point(p_text), t_end, dt, orbit_tol));
        if (sc->parsed()) return report("scaling", qv::suite_scaling(scale_n, scale_tol));
        if (orbit->parsed()) {
            qv::PVOptions o;
            o.dt = pv_dt;
            o.t_end = pv_t_end;
            o.sample_every = pv_every;
            const auto traj = qv::pv_integrate(parse_point(pv_p), o);
            qv::write_trajectory_csv(traj, pv_out);
            const double i0 = traj.front().i_value;
            double drift = 0.0;
            for (const auto& s : traj) drift = std::max(drift, std::abs(s.i_value - i0) / i0);
            std::printf("samples=%zu final=(%.10g, %.10g) i_value_drift=%.3g asymptote=%.10g\n",
                        traj.size(), traj.back().z.x1, traj.back().z.x2, drift,
                        qv::orbit_asymptote(parse_point(pv_p)));
            return kOk;
        }
        if (sim->parsed()) {
            sim_opts.plots = !no_plots;
            sim_opts.quiet = !verbose;
            const qv::ScenarioConfig cfg = qv::read_config(config_path);
            const auto res = qv::simulate(cfg, out_dir, sim_opts);
            std::printf("rows=%zu particles=%zu blob_delta=%.6g out=%s\n", res.rows.size(),
                        res.particles, res.blob_delta, out_dir.c_str());
            return kOk;
        }
        if (re->parsed()) {
            const qv::QuadrantField rho = qv::read_field(in_path);
            const qv::RearrangementResult r = qv::asymmetry(rho);
            qv::write_field(r.rho_star, re_out);
            std::printf("delta=%.10g l1_distance=%.10g shift=(%.10g, %.10g)\n", r.delta,
                        r.l1_distance, r.best_shift.x1, r.best_shift.x2);
            return kOk;
        }
    } catch (const qv::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const qv::FormatError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kFailure;
    }
    return kUsage;
}

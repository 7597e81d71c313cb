// spdelab: simulate, estimate and run Monte-Carlo studies for the stochastic heat equation.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "spdelab/config.hpp"
#include "spdelab/error.hpp"
#include "spdelab/estimators.hpp"
#include "spdelab/experiments.hpp"
#include "spdelab/mesh.hpp"
#include "spdelab/nonparametric.hpp"
#include "spdelab/results.hpp"
#include "spdelab/simulator.hpp"
#include "spdelab/trajectory_io.hpp"

namespace fs = std::filesystem;
using namespace spdelab;

namespace {

struct Options {
    std::string config;
    std::string out_dir;
    std::string trajectory;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
    std::string input;
    std::optional<double> truth;
    std::optional<double> nu, dt, dy;
    double beta = 2.0, gamma_t = 0.24, gamma_y = 0.2, p_y = 100.0;
    std::optional<double> tilde_gamma_y;
};

RunConfig load(const Options& o)
{
    RunConfig cfg = load_config(o.config);
    if (!o.out_dir.empty()) cfg.output.dir = o.out_dir;
    if (o.seed) cfg.seed = *o.seed;
    if (o.threads) cfg.mc.threads = *o.threads;
    return cfg;
}

OutputHeader header_for(const RunConfig& cfg, const std::string& kind, std::uint64_t seed)
{
    OutputHeader h{kind, seed, {}};
    h.add("model", cfg.model.summary());
    h.add("grid", "M=" + std::to_string(cfg.grid.M) + " N=" + std::to_string(cfg.grid.N));
    h.add("forward_policy", forward_policy_name(cfg.estimator.forward));
    h.add("alpha_bar", cfg.alpha_bar);
    return h;
}

void emit(const RunConfig& cfg, const std::string& stem, const std::string& csv, const nlohmann::json& json)
{
    if (cfg.output.csv) write_text_file(cfg.output.dir, stem + ".csv", csv);
    if (cfg.output.json) write_text_file(cfg.output.dir, stem + ".json", json.dump(2) + "\n");
}

void print_estimate(const std::string& label, const EstimateResult& e)
{
    std::printf("%s theta_hat=%.10g fisher=%.10g stderr=%.6g ci=[%.10g, %.10g] n=%zu\n", label.c_str(),
                e.theta_hat, e.fisher, e.standard_error, e.ci.lo, e.ci.hi, e.n_increments);
}

int cmd_simulate(const Options& o)
{
    RunConfig cfg = load(o);
    Trajectory traj = simulate(cfg.model, cfg.grid, cfg.seed, cfg.simulation);
    fs::path path = o.trajectory.empty() ? cfg.output.dir / "trajectory.spd1" : fs::path(o.trajectory);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    write_trajectory(path, traj);
    std::printf("wrote %s (M=%zu N=%zu nu=%.10g seed=%llu)\n", path.string().c_str(), traj.grid.M, traj.grid.N,
                traj.nu, static_cast<unsigned long long>(traj.seed));
    return 0;
}

// The trajectory's own nu is authoritative; the config supplies the rest.
KnownPhysics physics_for(const RunConfig& cfg, const Trajectory& traj)
{
    if (traj.grid.M != cfg.grid.M || traj.grid.N != cfg.grid.N || traj.grid.length != cfg.grid.length ||
        traj.grid.horizon != cfg.grid.horizon)
        fail(ErrorCode::GridMismatch, "trajectory grid differs from the configured grid");
    if (traj.alpha != cfg.model.dom.alpha)
        fail(ErrorCode::GridMismatch, "trajectory alpha differs from the configured alpha");
    ModelSpec m = cfg.model;
    m.nu = traj.nu;
    return KnownPhysics::from_model(m, cfg.estimator.forward);
}

int cmd_estimate(const Options& o, EstimatorKind kind)
{
    RunConfig cfg = load(o);
    fs::path path = o.trajectory.empty() ? cfg.output.dir / "trajectory.spd1" : fs::path(o.trajectory);
    Trajectory traj = read_trajectory(path);
    KnownPhysics phys = physics_for(cfg, traj);
    std::vector<EstimateRecord> rows;
    const std::string name = estimator_kind_name(kind);

    switch (kind) {
    case EstimatorKind::Global: {
        EstimateRecord r;
        r.estimator = name;
        r.result = estimate_global(traj, phys, cfg.alpha_bar);
        print_estimate(name, *r.result);
        rows.push_back(r);
        break;
    }
    case EstimatorKind::Localized: {
        EstimateRecord r;
        r.estimator = name;
        r.y0 = cfg.estimator.window.y0;
        r.t0 = cfg.estimator.window.t0;
        r.result = estimate_localized(traj, phys, cfg.estimator.window, cfg.alpha_bar);
        print_estimate(name, *r.result);
        rows.push_back(r);
        break;
    }
    case EstimatorKind::Nonparametric: {
        bool any = false;
        for (const auto& p : estimate_nonparametric(traj, phys, cfg.nonparam)) {
            EstimateRecord r;
            r.estimator = name;
            r.y0 = p.point.y0;
            r.t0 = p.point.t0;
            r.clipped = p.clipped;
            r.result = p.result;
            if (p.error) {
                r.status = error_code_name(*p.error);
                std::fprintf(stderr, "warning[%s]: point (%g, %g): %s\n", r.status.c_str(), p.point.y0, p.point.t0,
                             p.message.c_str());
            } else {
                any = true;
                char label[96];
                std::snprintf(label, sizeof label, "%s(%g,%g)", name.c_str(), p.point.y0, p.point.t0);
                print_estimate(label, *r.result);
            }
            rows.push_back(r);
        }
        if (!any) fail(ErrorCode::ZeroInformation, "no evaluation point produced an estimate");
        break;
    }
    case EstimatorKind::Spectral: {
        EstimateRecord r;
        r.estimator = name;
        r.spectral_modes = cfg.estimator.spectral_modes ? *cfg.estimator.spectral_modes
                                                        : default_mode_count(phys.nu, phys.dom);
        r.result = estimate_spectral(traj, phys, r.spectral_modes, cfg.alpha_bar);
        print_estimate(name + "(K=" + std::to_string(r.spectral_modes) + ")", *r.result);
        rows.push_back(r);
        break;
    }
    }

    OutputHeader h = header_for(cfg, "estimate", traj.seed);
    h.add("trajectory", path.string());
    h.add("nu", traj.nu);
    std::ostringstream csv;
    write_estimate_csv(csv, h, rows);
    emit(cfg, "estimate", csv.str(), estimate_json(h, rows));
    return 0;
}

int cmd_mc(const Options& o)
{
    RunConfig cfg = load(o);
    MCConfig mc = cfg.mc_config();
    MCResult result = run_mc(mc);

    OutputHeader h = header_for(cfg, "mc", result.base_seed);
    h.add("estimator", estimator_kind_name(mc.estimator.kind));
    h.add("runs", std::to_string(mc.runs));
    h.add("paired_seeds", mc.paired_seeds ? "true" : "false");
    h.add("max_blowup_fraction", mc.max_blowup_fraction);
    h.add("blowup_policy", "excluded from aggregates and counted");

    std::optional<RateFit> fit, subset;
    if (mc.nus.size() >= 3) fit = fit_rate(result);
    if (cfg.mc.rate_max_nu) {
        std::size_t n = 0;
        for (double nu : mc.nus) n += nu <= *cfg.mc.rate_max_nu;
        if (n >= 3) subset = fit_rate(result, *cfg.mc.rate_max_nu);
    }

    for (const auto& s : result.per_nu) {
        std::printf("nu=%-10g used=%zu/%zu mse=%.6g bias=%.4g coverage=%.3f", s.nu, s.used, s.runs.size(), s.mse,
                    s.bias, s.diagnostics.coverage);
        if (s.mesh) std::printf(" mesh=%s", mesh_status_name(s.mesh->status));
        std::printf("\n");
    }

    if (cfg.output.csv) {
        std::ostringstream a, b;
        write_mc_csv(a, h, result);
        write_diagnostics_csv(b, h, result);
        write_text_file(cfg.output.dir, "mc.csv", a.str());
        write_text_file(cfg.output.dir, "diagnostics.csv", b.str());
        if (fit) {
            std::ostringstream c;
            write_rate_csv(c, h, *fit);
            write_text_file(cfg.output.dir, "rate.csv", c.str());
        }
        if (subset) {
            OutputHeader hs = h;
            hs.add("rate_max_nu", *cfg.mc.rate_max_nu);
            std::ostringstream c;
            write_rate_csv(c, hs, *subset);
            write_text_file(cfg.output.dir, "rate_subset.csv", c.str());
        }
        std::ostringstream gp;
        write_plot_script(gp, "diagnostics.csv", fit);
        write_text_file(cfg.output.dir, "plot_mse.gp", gp.str());
    }
    if (cfg.output.json) write_text_file(cfg.output.dir, "mc.json", mc_json(h, result, fit, subset).dump(2) + "\n");

    if (fit) std::printf("slope=%.6g r2=%.6g n=%zu\n", fit->slope, fit->r_squared, fit->n_points);
    if (subset) std::printf("slope(nu<=%g)=%.6g r2=%.6g n=%zu\n", *cfg.mc.rate_max_nu, subset->slope,
                            subset->r_squared, subset->n_points);
    return 0;
}

int cmd_rate(const Options& o)
{
    std::ifstream in(o.input);
    if (!in) fail(ErrorCode::Io, "cannot open " + o.input);
    auto points = read_mse_table(in, o.truth);
    RateFit fit = fit_rate(points);
    fs::path dir = o.out_dir.empty() ? fs::path(o.input).parent_path() : fs::path(o.out_dir);
    if (dir.empty()) dir = ".";
    OutputHeader h{"rate", 0, {}};
    h.add("input", o.input);
    std::ostringstream csv;
    write_rate_csv(csv, h, fit);
    write_text_file(dir, "rate.csv", csv.str());
    std::printf("slope=%.10g intercept=%.10g r2=%.10g n=%zu\n", fit.slope, fit.intercept, fit.r_squared,
                fit.n_points);
    return 0;
}

int cmd_check_mesh(const Options& o)
{
    MeshPolicy policy;
    double nu = 0, dt = 0;
    std::optional<double> dy;
    if (!o.config.empty()) {
        RunConfig cfg = load(o);
        policy = cfg.mesh_policy.value_or(MeshPolicy{cfg.model.dom.alpha, policy.gamma_t, policy.gamma_y, policy.p_y,
                                                     cfg.model.dom.alpha * policy.gamma_y});
        nu = cfg.model.nu;
        dt = cfg.grid.dt();
        dy = cfg.grid.dy();
    } else {
        policy = MeshPolicy{o.beta, o.gamma_t, o.gamma_y, o.p_y, o.tilde_gamma_y.value_or(o.beta * o.gamma_y)};
    }
    if (o.nu) nu = *o.nu;
    if (o.dt) dt = *o.dt;
    if (o.dy) dy = o.dy;
    if (!(nu > 0.0)) fail(ErrorCode::InvalidArgument, "check-mesh needs --nu > 0 (or a config)");
    if (!(dt > 0.0)) fail(ErrorCode::InvalidArgument, "check-mesh needs --dt > 0 (or a config)");

    MeshReport r = dy ? check_mesh(nu, dt, *dy, policy) : check_mesh_time(nu, dt, policy);
    std::printf("%s\n", mesh_status_name(r.status));
    std::printf("r_t=%.10g  (delta_t / nu^%.10g)\n", r.ratio_t, r.exponent_t);
    if (dy)
        std::printf("r_y=%.10g  (delta_y / (nu^%.10g delta_t^%.10g))\n", r.ratio_y, r.exponent_y_nu,
                    r.exponent_y_dt);
    else
        std::printf("r_y=n/a  (no --dy given)\n");
    std::printf("first_increment_ratio=%.10g\n", r.first_increment_ratio);
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"spdelab: parameter estimation for the stochastic heat equation"};
    app.require_subcommand(1);
    Options o;

    auto add_config = [&](CLI::App* c, bool required) {
        auto* opt = c->add_option("-c,--config", o.config, "JSON run configuration");
        if (required) opt->required()->check(CLI::ExistingFile);
        c->add_option("-o,--out", o.out_dir, "output directory (overrides output.dir)");
    };

    auto* sim = app.add_subcommand("simulate", "simulate a trajectory and write it as SPD1");
    add_config(sim, true);
    sim->add_option("-t,--trajectory", o.trajectory, "output file (default <out>/trajectory.spd1)");
    sim->add_option("--seed", o.seed, "override simulation.seed");

    struct EstCmd {
        const char* name;
        const char* help;
        EstimatorKind kind;
    };
    const EstCmd est_cmds[] = {
        {"estimate", "global MLE from an SPD1 trajectory", EstimatorKind::Global},
        {"estimate-local", "localized estimator on estimator.window", EstimatorKind::Localized},
        {"estimate-nonparam", "nonparametric estimates at estimator.nonparam.points", EstimatorKind::Nonparametric},
        {"estimate-spectral", "spectral OU estimator (linear reaction)", EstimatorKind::Spectral},
    };
    std::vector<std::pair<CLI::App*, EstimatorKind>> estimators;
    for (const auto& e : est_cmds) {
        auto* c = app.add_subcommand(e.name, e.help);
        add_config(c, true);
        c->add_option("-t,--trajectory", o.trajectory, "SPD1 input (default <out>/trajectory.spd1)");
        estimators.emplace_back(c, e.kind);
    }

    auto* mc = app.add_subcommand("mc", "Monte-Carlo study over mc.nus");
    add_config(mc, true);
    mc->add_option("--threads", o.threads, "worker count (0 = all cores; SPDE_LAB_THREADS caps it)");

    auto* rate = app.add_subcommand("rate", "log-log fit of MSE against nu from a CSV");
    rate->add_option("-i,--input", o.input, "CSV with nu,mse or per-run nu,theta_hat columns")
        ->required()
        ->check(CLI::ExistingFile);
    rate->add_option("--truth", o.truth, "true theta for per-run input");
    rate->add_option("-o,--out", o.out_dir, "directory for rate.csv (default: next to the input)");

    auto* mesh = app.add_subcommand("check-mesh", "check the mesh conditions for the discretized estimator");
    add_config(mesh, false);
    mesh->add_option("--nu", o.nu);
    mesh->add_option("--dt", o.dt);
    mesh->add_option("--dy", o.dy);
    mesh->add_option("--beta", o.beta);
    mesh->add_option("--gamma-t", o.gamma_t);
    mesh->add_option("--gamma-y", o.gamma_y);
    mesh->add_option("--p-y", o.p_y);
    mesh->add_option("--tilde-gamma-y", o.tilde_gamma_y);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(o);
        for (auto [c, kind] : estimators)
            if (c->parsed()) return cmd_estimate(o, kind);
        if (mc->parsed()) return cmd_mc(o);
        if (rate->parsed()) return cmd_rate(o);
        if (mesh->parsed()) return cmd_check_mesh(o);
    } catch (const Error& e) {
        std::fprintf(stderr, "error[%s]: %s\n", error_code_name(e.code()), e.what());
        return is_numerical(e.code()) ? 3 : 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error[io]: %s\n", e.what());
        return 2;
    }
    return 2;
}

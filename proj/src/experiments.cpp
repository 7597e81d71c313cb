#include "spdelab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <sstream>
#include <thread>

#include "spdelab/error.hpp"
#include "spdelab/spectral.hpp"

namespace spdelab {

const char* estimator_kind_name(EstimatorKind kind)
{
    switch (kind) {
    case EstimatorKind::Global: return "global";
    case EstimatorKind::Localized: return "local";
    case EstimatorKind::Nonparametric: return "nonparametric";
    case EstimatorKind::Spectral: return "spectral";
    }
    return "global";
}

EstimatorKind estimator_kind_from_name(const std::string& name)
{
    if (name == "global") return EstimatorKind::Global;
    if (name == "local") return EstimatorKind::Localized;
    if (name == "nonparametric") return EstimatorKind::Nonparametric;
    if (name == "spectral") return EstimatorKind::Spectral;
    fail(ErrorCode::InvalidArgument,
         "unknown estimator kind '" + name + "' (expected global, local, nonparametric or spectral)");
}

void MCConfig::validate() const
{
    require(runs >= 2, "mc: need at least 2 runs per nu");
    require(!nus.empty(), "mc: list of nu values is empty");
    for (std::size_t i = 0; i < nus.size(); ++i) {
        require(std::isfinite(nus[i]) && nus[i] > 0.0, "mc: every nu must be > 0");
        for (std::size_t j = 0; j < i; ++j) require(nus[i] != nus[j], "mc: nu values must be distinct");
    }
    require(alpha_bar > 0.0 && alpha_bar < 1.0, "mc: alpha_bar must lie in (0, 1)");
    require(max_blowup_fraction >= 0.0 && max_blowup_fraction <= 1.0, "mc: max_blowup_fraction must lie in [0, 1]");
    ModelSpec probe = model;
    probe.nu = nus.front();
    probe.validate_for(grid);
    if (estimator.kind == EstimatorKind::Global || estimator.kind == EstimatorKind::Spectral) {
        require(model.theta.is_constant(), "mc: global and spectral estimators need a constant theta");
    }
    if (estimator.kind == EstimatorKind::Spectral) {
        require(model.reaction.is_linear(), "mc: spectral estimator requires the linear reaction");
    }
    if (mesh_policy) mesh_policy->validate();
}

std::uint64_t run_seed(const MCConfig& config, std::size_t nu_index, std::size_t run)
{
    return derive_seed(config.base_seed, config.paired_seeds ? 0 : nu_index + 1, run);
}

std::size_t resolve_thread_count(std::size_t requested)
{
    std::size_t n = requested;
    if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SPDE_LAB_THREADS"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const unsigned long cap = std::strtoul(env, &end, 10);
        if (end != env && cap > 0) n = std::min<std::size_t>(n, cap);
    }
    return std::max<std::size_t>(n, 1);
}

namespace {

struct NuPlan {
    ModelSpec model;
    double truth = 0.0;
    std::optional<Window> window;
    QuadratureRegion region;
    std::size_t modes = 0;
};

NuPlan plan_for(const MCConfig& config, double nu)
{
    NuPlan p{config.model, 0.0, std::nullopt, global_region(config.grid), 0};
    p.model.nu = nu;
    const auto& est = config.estimator;
    switch (est.kind) {
    case EstimatorKind::Global: p.truth = p.model.theta.constant_value(); break;
    case EstimatorKind::Spectral:
        p.truth = p.model.theta.constant_value();
        p.modes = est.spectral_modes ? *est.spectral_modes : default_mode_count(nu, p.model.dom);
        break;
    case EstimatorKind::Localized:
        p.window = est.window;
        p.truth = p.model.theta(est.window.y0, est.window.t0);
        p.region = resolve_window(config.grid, est.window);
        break;
    case EstimatorKind::Nonparametric: {
        NonparamSpec spec{est.eta_y, est.eta_t, {est.point}, est.bandwidths, config.alpha_bar};
        const auto phys = KnownPhysics::from_model(p.model, est.forward);
        bool clipped = false;
        p.window = clipped_window(est.point, requested_bandwidths(spec, phys, config.grid.horizon),
                                  config.grid.horizon, clipped);
        p.truth = p.model.theta(est.point.y0, est.point.t0);
        p.region = resolve_window(config.grid, *p.window);
        break;
    }
    }
    return p;
}

RunRecord run_cell(const MCConfig& config, const NuPlan& plan, std::size_t run, std::uint64_t seed)
{
    RunRecord rec;
    rec.run = run;
    rec.seed = seed;
    const auto phys = KnownPhysics::from_model(plan.model, config.estimator.forward);
    std::optional<EstimateResult> est;
    try {
        if (config.estimator.kind == EstimatorKind::Spectral) {
            ModeAccumulator acc(phys, config.grid, plan.modes);
            simulate_streaming(
                plan.model, config.grid, seed, [&](std::size_t k, std::span<const double> row, std::span<const double>) { acc.observe(k, row); },
                config.simulation);
            est = acc.finish(config.alpha_bar);
        } else {
            IncrementAccumulator acc(phys, config.grid, {plan.region});
            simulate_streaming(
                plan.model, config.grid, seed, [&](std::size_t k, std::span<const double> row, std::span<const double> f) { acc.observe(k, row, f); },
                config.simulation);
            est = finish_estimate(acc.numerator(0), acc.information(0), acc.increments(0), config.alpha_bar,
                                  plan.window);
        }
    } catch (const Error& e) {
        if (e.code() != ErrorCode::BlowUp) throw;
        rec.blowup = true;
        return rec;
    }
    rec.theta_hat = est->theta_hat;
    rec.fisher = est->fisher;
    rec.ci_lo = est->ci.lo;
    rec.ci_hi = est->ci.hi;
    rec.covered = est->ci.lo <= plan.truth && plan.truth <= est->ci.hi;
    return rec;
}

void summarize(NuSummary& s)
{
    std::vector<double> theta, err, sq, z;
    std::size_t covered = 0;
    for (const auto& r : s.runs) {
        if (r.blowup) {
            ++s.blowups;
            continue;
        }
        theta.push_back(r.theta_hat);
        err.push_back(r.theta_hat - s.truth);
        sq.push_back(err.back() * err.back());
        z.push_back(std::sqrt(r.fisher) * err.back());
        if (r.covered) ++covered;
    }
    s.used = theta.size();
    if (s.used == 0) {
        s.mse = s.bias = s.variance = std::numeric_limits<double>::quiet_NaN();
        return;
    }
    const double n = static_cast<double>(s.used);
    s.mse = pairwise_sum(sq) / n;
    s.bias = pairwise_sum(err) / n;
    s.variance = moments(theta).variance;
    s.diagnostics = normality(z);
    s.diagnostics.coverage = static_cast<double>(covered) / n;
}

}  // namespace

MCResult run_mc(const MCConfig& config)
{
    config.validate();
    const std::size_t n_nu = config.nus.size();
    const std::size_t runs = config.runs;

    std::vector<NuPlan> plans;
    MCResult result;
    result.base_seed = config.base_seed;
    result.per_nu.resize(n_nu);
    for (std::size_t i = 0; i < n_nu; ++i) {
        plans.push_back(plan_for(config, config.nus[i]));
        auto& s = result.per_nu[i];
        s.nu = config.nus[i];
        s.truth = plans[i].truth;
        s.window = plans[i].window;
        s.spectral_modes = plans[i].modes;
        s.runs.resize(runs);
        if (config.mesh_policy) s.mesh = check_mesh(plans[i].model, config.grid, *config.mesh_policy);
    }

    const std::size_t cells = n_nu * runs;
    std::vector<std::exception_ptr> errors(cells);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t c = next++; c < cells; c = next++) {
            const std::size_t i = c / runs;
            const std::size_t r = c % runs;
            try {
                result.per_nu[i].runs[r] = run_cell(config, plans[i], r, run_seed(config, i, r));
            } catch (...) {
                errors[c] = std::current_exception();
            }
        }
    };
    const std::size_t workers = std::min(resolve_thread_count(config.threads), cells);
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    for (auto& s : result.per_nu) {
        summarize(s);
        if (static_cast<double>(s.blowups) > config.max_blowup_fraction * static_cast<double>(runs)) {
            std::ostringstream msg;
            msg << s.blowups << " of " << runs << " runs blew up at nu = " << s.nu << " (cap "
                << config.max_blowup_fraction * 100.0 << "%)";
            fail(ErrorCode::TooManyBlowUps, msg.str());
        }
    }
    return result;
}

NormalityReport coverage_and_normality(const MCResult& mc, std::size_t nu_index)
{
    require(nu_index < mc.per_nu.size(), "coverage_and_normality: nu index out of range");
    const auto& s = mc.per_nu[nu_index];
    require(s.used >= 30, "coverage_and_normality: need at least 30 completed runs");
    return s.diagnostics;
}

RateFit fit_rate(const MCResult& mc, double max_nu)
{
    std::vector<std::pair<double, double>> pts;
    for (const auto& s : mc.per_nu) {
        if (s.nu <= max_nu) pts.emplace_back(s.nu, s.mse);
    }
    return fit_rate(pts);
}

}  // namespace spdelab

#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "spdelab/estimators.hpp"
#include "spdelab/mesh.hpp"
#include "spdelab/model.hpp"
#include "spdelab/nonparametric.hpp"
#include "spdelab/simulator.hpp"
#include "spdelab/statistics.hpp"

namespace spdelab {

enum class EstimatorKind { Global, Localized, Nonparametric, Spectral };

const char* estimator_kind_name(EstimatorKind kind);
EstimatorKind estimator_kind_from_name(const std::string& name);

struct EstimatorSelection {
    EstimatorKind kind = EstimatorKind::Global;
    ForwardPolicy forward = ForwardPolicy::ImplicitEuler;
    /// Localized.
    Window window;
    /// Nonparametric, single evaluation point.
    EvalPoint point;
    double eta_y = 1.0;
    double eta_t = 1.0;
    std::optional<Bandwidths> bandwidths;
    /// Spectral; empty selects max{k : nu mu_k <= 1}.
    std::optional<std::size_t> spectral_modes;
};

struct MCConfig {
    /// Template; its nu is replaced by each entry of `nus`.
    ModelSpec model;
    GridSpec grid;
    std::vector<double> nus;
    std::size_t runs = 100;
    std::uint64_t base_seed = 1;
    EstimatorSelection estimator;
    double alpha_bar = 0.05;
    /// Worker count; 0 = hardware concurrency. SPDE_LAB_THREADS caps it.
    std::size_t threads = 0;
    /// Same seed for run r at every nu (paired comparisons across nu).
    bool paired_seeds = false;
    double max_blowup_fraction = 0.1;
    std::optional<MeshPolicy> mesh_policy;
    SimulationOptions simulation;

    void validate() const;
};

struct RunRecord {
    std::size_t run = 0;
    std::uint64_t seed = 0;
    double theta_hat = std::numeric_limits<double>::quiet_NaN();
    double fisher = std::numeric_limits<double>::quiet_NaN();
    double ci_lo = std::numeric_limits<double>::quiet_NaN();
    double ci_hi = std::numeric_limits<double>::quiet_NaN();
    bool covered = false;
    bool blowup = false;
};

struct NuSummary {
    double nu = 0.0;
    /// Value the estimator targets: theta, or theta(y0, t0) for local estimators.
    double truth = 0.0;
    std::vector<RunRecord> runs;
    std::size_t used = 0;
    std::size_t blowups = 0;
    double mse = 0.0;
    double bias = 0.0;
    double variance = 0.0;
    NormalityReport diagnostics;
    std::optional<MeshReport> mesh;
    std::optional<Window> window;
    std::size_t spectral_modes = 0;
};

struct MCResult {
    std::uint64_t base_seed = 0;
    std::vector<NuSummary> per_nu;
};

std::uint64_t run_seed(const MCConfig& config, std::size_t nu_index, std::size_t run);

/// Worker count after applying the SPDE_LAB_THREADS cap.
std::size_t resolve_thread_count(std::size_t requested);

/// Simulates and estimates every (nu, run) cell. Results do not depend on the
/// worker count or scheduling. Blow-ups are excluded and counted; throws
/// TooManyBlowUps when more than max_blowup_fraction of the runs at any nu blew up.
MCResult run_mc(const MCConfig& config);

/// Diagnostics at one nu from the runs that did not blow up; needs at least 30.
NormalityReport coverage_and_normality(const MCResult& mc, std::size_t nu_index);

/// Log-log fit of MSE against nu over entries with nu <= max_nu.
RateFit fit_rate(const MCResult& mc, double max_nu = std::numeric_limits<double>::infinity());

}  // namespace spdelab

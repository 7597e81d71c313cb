#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "spdelab/grid.hpp"
#include "spdelab/model.hpp"
#include "spdelab/sine_transform.hpp"
#include "spdelab/simulator.hpp"

namespace spdelab {

/// Everything the estimators treat as known: the model without theta.
struct KnownPhysics {
    DomainSpec dom;
    double nu = 0.0;
    Reaction reaction = Reaction::zero();
    Profile sigma = Profile::constant(1.0);
    ForwardPolicy forward = ForwardPolicy::Exact;

    static KnownPhysics from_model(const ModelSpec& model, ForwardPolicy forward);
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Space-time window Λ_{δy}(y0) x (t0 - δt, t0 + δt) with Λ_{δy}(y0) = y0 + δy (Λ - y0).
struct Window {
    double y0 = 0.5;
    double t0 = 0.5;
    double delta_y = 1.0;
    double delta_t = 0.5;

    /// The full domain and (0, T).
    static Window full(double length, double horizon);
};

struct EstimateResult {
    double theta_hat = 0.0;
    /// Observed Fisher information; the estimator's denominator.
    double fisher = 0.0;
    double standard_error = 0.0;
    Interval ci;
    double alpha_bar = 0.05;
    std::optional<Window> window;
    std::size_t n_increments = 0;
};

/// Standard normal quantile.
double normal_quantile(double p);

/// theta_hat -+ q_{1 - alpha_bar/2} fisher^{-1/2}.
Interval confidence_interval(double theta_hat, double fisher, double alpha_bar);

/// Builds the result for numerator / information; ZeroInformation below 1e-300.
EstimateResult finish_estimate(double numerator, double information, std::size_t increments, double alpha_bar,
                               std::optional<Window> window = {});

/// Index ranges a window covers: nodes [node_lo, node_hi] (trapezoid weights,
/// halved at both ends) and increments k in [step_lo, step_hi], each using
/// rows k and k + 1.
struct QuadratureRegion {
    std::size_t node_lo = 0;
    std::size_t node_hi = 0;
    std::size_t step_lo = 1;
    std::size_t step_hi = 0;
};

/// Nodes 0..M and increments 1..N-1 (the first increment is always skipped).
QuadratureRegion global_region(const GridSpec& grid);

/// Nodes inside the closed set Λ_{δy}(y0), increments with t_k in the open
/// interval (t0 - δt, t0 + δt), intersected with the global range. Throws
/// InvalidArgument for an illegal window and EmptyWindow when fewer than two
/// nodes or no increment fall inside.
QuadratureRegion resolve_window(const GridSpec& grid, const Window& window);

/// Streams trajectory rows and accumulates, per region,
///   numerator   = sum_k <sigma^-2 f(X_k), X_{k+1} - S X_k>
///   information = sum_k dt ||sigma^-1 f(X_k)||^2
/// with trapezoidal inner products. Rows must arrive in order k = 0, 1, ..., N.
class IncrementAccumulator {
public:
    IncrementAccumulator(const KnownPhysics& phys, const GridSpec& grid, std::vector<QuadratureRegion> regions);

    /// `reaction`, when given, must equal phys.reaction applied to `row` at every node.
    void observe(std::size_t k, std::span<const double> row, std::span<const double> reaction = {});

    std::size_t regions() const { return regions_.size(); }
    double numerator(std::size_t i) const { return numerator_[i]; }
    double information(std::size_t i) const { return information_[i]; }
    std::size_t increments(std::size_t i) const { return increments_[i]; }

private:
    void accumulate_step(std::size_t k, std::span<const double> next);

    KnownPhysics phys_;
    GridSpec grid_;
    std::vector<QuadratureRegion> regions_;
    SineTransform dst_;
    std::vector<double> factor_;
    std::vector<double> inv_sigma2_;
    std::vector<double> prev_;
    std::vector<double> forward_;
    std::vector<double> coeffs_;
    std::vector<double> f_;
    bool f_ready_ = false;
    std::vector<double> g_;
    std::vector<double> residual_;
    std::vector<double> numerator_;
    std::vector<double> information_;
    std::vector<std::size_t> increments_;
    std::size_t node_lo_ = 0;
    std::size_t node_hi_ = 0;
    std::size_t step_lo_ = 0;
    std::size_t step_hi_ = 0;
    std::size_t expected_row_ = 0;
};

/// Fully discretized MLE over all increments after the first.
EstimateResult estimate_global(const Trajectory& traj, const KnownPhysics& phys, double alpha_bar);

/// The same ratio with inner products restricted to the window's nodes and the
/// time sum to its increments. The forward step uses the full observed field.
EstimateResult estimate_localized(const Trajectory& traj, const KnownPhysics& phys, const Window& window,
                                  double alpha_bar);

/// Numerator and information of the discrete OU drift estimator for one mode.
struct OuSums {
    double numerator = 0.0;
    double information = 0.0;
};

/// sum_k x_k (x_{k+1} - s_k x_k) and sum_k x_k^2 dt_k with s_k the forward factor
/// for nu * mu * dt_k. The default ExplicitEuler gives the Riemann-Ito form
/// x_k (x_{k+1} - x_k + nu mu x_k dt_k).
OuSums ou_sums(std::span<const double> times, std::span<const double> path, double nu, double mu,
               ForwardPolicy policy = ForwardPolicy::ExplicitEuler);

/// Drift MLE of dX = (theta - nu mu) X dt + dW from a discretely observed path.
double ou_mle(std::span<const double> times, std::span<const double> path, double nu, double mu,
              ForwardPolicy policy = ForwardPolicy::ExplicitEuler);

/// K_nu = max{k >= 1 : nu mu_k <= 1}, at least 1 and at most dom.modes.
std::size_t default_mode_count(double nu, const DomainSpec& dom);

/// Aggregated OU estimator over Fourier modes 1..mode_count, linear reaction only.
EstimateResult estimate_spectral(const Trajectory& traj, const KnownPhysics& phys, std::size_t mode_count,
                                 double alpha_bar = 0.05);

/// Streaming form of estimate_spectral: keeps the first mode_count coefficient paths.
class ModeAccumulator {
public:
    ModeAccumulator(const KnownPhysics& phys, const GridSpec& grid, std::size_t mode_count);

    void observe(std::size_t k, std::span<const double> row);
    EstimateResult finish(double alpha_bar) const;
    /// Coefficient path of mode `mode` (1-based).
    std::span<const double> path(std::size_t mode) const;

private:
    KnownPhysics phys_;
    GridSpec grid_;
    std::size_t modes_;
    SineTransform dst_;
    std::vector<double> coeffs_;
    std::vector<double> paths_;  // mode-major, (N+1) per mode
    std::size_t expected_row_ = 0;
};

/// Shape checks shared by the trajectory-based estimators; GridMismatch on failure.
void check_compatible(const Trajectory& traj, const KnownPhysics& phys);

}  // namespace spdelab

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spdelab/error.hpp"
#include "spdelab/estimators.hpp"

namespace spdelab {

struct Bandwidths {
    double delta_y = 1.0;
    double delta_t = 1.0;
    double eta_eff = 0.0;
};

/// 1/eta_eff = 1/eta_y + 1/eta_t (one space dimension).
double effective_smoothness(double eta_y, double eta_t);

/// delta_y = phi^{-eta_eff / (eta_y (2 eta_eff + 1))}, delta_t likewise with eta_t.
/// Balances the Hölder bias against the stochastic error phi^{-1/2}.
Bandwidths optimal_bandwidths(double eta_y, double eta_t, double phi_value);

/// Error exponent eta_eff / (2 eta_eff + 1) of the balanced estimator in phi.
double nonparametric_rate_exponent(double eta_y, double eta_t);

struct EvalPoint {
    double y0 = 0.5;
    double t0 = 0.5;
};

struct NonparamSpec {
    double eta_y = 1.0;
    double eta_t = 1.0;
    std::vector<EvalPoint> points;
    /// Explicit (delta_y, delta_t); empty selects the optimal bandwidths.
    std::optional<Bandwidths> bandwidths;
    double alpha_bar = 0.05;
};

struct PointEstimate {
    EvalPoint point;
    Bandwidths requested;
    Window window;
    bool clipped = false;
    std::optional<EstimateResult> result;
    std::optional<ErrorCode> error;
    std::string message;
};

/// Bandwidths requested by the spec for a given diffusivity and horizon.
Bandwidths requested_bandwidths(const NonparamSpec& spec, const KnownPhysics& phys, double horizon);

/// Window centred at `point`, with delta_t clipped to min(t0, T - t0) and
/// delta_y to 1. Sets `clipped` when either bound was active.
Window clipped_window(const EvalPoint& point, const Bandwidths& bw, double horizon, bool& clipped);

/// Localized estimates at every evaluation point from a single pass over the
/// trajectory. Per-point failures (EmptyWindow, ZeroInformation, bad point) are
/// recorded in the entry, not thrown.
std::vector<PointEstimate> estimate_nonparametric(const Trajectory& traj, const KnownPhysics& phys,
                                                  const NonparamSpec& spec);

}  // namespace spdelab

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "spdelab/grid.hpp"
#include "spdelab/model.hpp"
#include "spdelab/rng.hpp"

namespace spdelab {

/// One-step approximation of the semigroup S_{nu*delta} in the eigenbasis.
enum class ForwardPolicy {
    Exact,          ///< exp(-nu mu_k delta)
    ImplicitEuler,  ///< 1 / (1 + nu mu_k delta), the simulator's own step
    ExplicitEuler,  ///< 1 - nu mu_k delta, the Riemann-Ito drift correction
};

const char* forward_policy_name(ForwardPolicy policy);
ForwardPolicy forward_policy_from_name(const std::string& name);

/// Per-mode multiplier for nu * mu_k * delta = `decay`.
double forward_factor(ForwardPolicy policy, double decay);

struct SimulationOptions {
    /// Multiplies the driving noise; 0 gives the deterministic PDE.
    double noise_scale = 1.0;
    /// Sup-norm above which a step is reported as blow-up.
    double blowup_guard = 1e6;
    /// Skip the explicit-reaction stability check.
    bool force = false;
};

/// Observations X_{t_k}(y_j), row-major (N+1) x (M+1).
struct Trajectory {
    GridSpec grid;
    double nu = 0.0;
    double alpha = 2.0;
    std::uint64_t seed = 0;
    std::vector<double> values;

    std::size_t rows() const { return grid.N + 1; }
    std::span<const double> row(std::size_t k) const { return {values.data() + k * (grid.M + 1), grid.M + 1}; }
    std::span<double> row(std::size_t k) { return {values.data() + k * (grid.M + 1), grid.M + 1}; }

    bool operator==(const Trajectory&) const = default;
};

/// sigma * dW over one step: i.i.d. N(0, dt) coefficients on modes 1..M-1,
/// synthesized to nodes and multiplied by the nodal noise level.
GridField sample_noise_increment(const GridSpec& grid, std::span<const double> sigma, NormalStream& rng);

/// Semi-implicit Euler step: reaction and noise explicit, the fractional
/// Laplacian solved exactly in the eigenbasis,
///   c_k(x_{k+1}) = c_k(x + dt theta(., t) f(x) + noise) / (1 + nu dt mu_k).
GridField step(const ModelSpec& model, const GridSpec& grid, const GridField& x, double t, const GridField& noise);

/// `reaction` holds f(row) at every node for k < N and is empty for k = N.
using RowObserver =
    std::function<void(std::size_t k, std::span<const double> row, std::span<const double> reaction)>;

/// Runs the scheme from x0 and hands every row (k = 0..N) to `observer` without
/// storing the trajectory. Throws Error(BlowUp) with the failing step index.
void simulate_streaming(const ModelSpec& model, const GridSpec& grid, std::uint64_t seed,
                        const RowObserver& observer, const SimulationOptions& options = {});

Trajectory simulate(const ModelSpec& model, const GridSpec& grid, std::uint64_t seed,
                    const SimulationOptions& options = {});

/// Applies the one-step forward operator to a nodal field.
GridField forward_semigroup(const GridField& x, double delta, double nu, const DomainSpec& dom,
                            ForwardPolicy policy = ForwardPolicy::Exact);

/// Explicit-reaction stability check: dt * sup|theta| * |f'(0)| < 2. Throws
/// InvalidArgument when violated.
void check_stability(const ModelSpec& model, const GridSpec& grid);

}  // namespace spdelab

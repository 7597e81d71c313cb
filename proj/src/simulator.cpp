#include "spdelab/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spdelab/error.hpp"
#include "spdelab/sine_transform.hpp"
#include "spdelab/spectral.hpp"

namespace spdelab {

const char* forward_policy_name(ForwardPolicy policy)
{
    switch (policy) {
    case ForwardPolicy::Exact: return "exact";
    case ForwardPolicy::ImplicitEuler: return "implicit-euler";
    case ForwardPolicy::ExplicitEuler: return "explicit-euler";
    }
    return "exact";
}

ForwardPolicy forward_policy_from_name(const std::string& name)
{
    if (name == "exact") return ForwardPolicy::Exact;
    if (name == "implicit-euler") return ForwardPolicy::ImplicitEuler;
    if (name == "explicit-euler") return ForwardPolicy::ExplicitEuler;
    fail(ErrorCode::InvalidArgument,
         "unknown forward policy '" + name + "' (expected exact, implicit-euler or explicit-euler)");
}

double forward_factor(ForwardPolicy policy, double decay)
{
    switch (policy) {
    case ForwardPolicy::Exact: return std::exp(-decay);
    case ForwardPolicy::ImplicitEuler: return 1.0 / (1.0 + decay);
    case ForwardPolicy::ExplicitEuler: return 1.0 - decay;
    }
    return std::exp(-decay);
}

namespace {

// Workspace for repeated semi-implicit steps on one grid.
class Stepper {
public:
    Stepper(const ModelSpec& model, const GridSpec& grid)
        : model_(model),
          grid_(grid),
          dst_(grid.M, grid.length),
          sigma_(model.sigma.sample(grid)),
          drift_(grid.M + 1),
          reaction_(grid.M + 1),
          noise_(grid.M + 1),
          noise_coeffs_(grid.M - 1),
          coeffs_(model.dom.modes),
          damping_(model.dom.modes)
    {
        const double dt = grid.dt();
        const auto mu = fractional_eigenvalues(model.dom);
        for (std::size_t k = 0; k < mu.size(); ++k) damping_[k] = 1.0 / (1.0 + model.nu * dt * mu[k]);
        sigma_constant_ = std::all_of(sigma_.begin(), sigma_.end(), [&](double s) { return s == sigma_[0]; });
    }

    const std::vector<double>& sigma() const { return sigma_; }

    // sigma * dW into noise_.
    void draw_noise(NormalStream& rng, double scale)
    {
        const double sd = std::sqrt(grid_.dt()) * scale;
        for (double& c : noise_coeffs_) c = sd * rng();
        dst_.inverse(noise_coeffs_, noise_);
        if (!(sigma_constant_ && sigma_[0] == 1.0)) {
            for (std::size_t j = 0; j <= grid_.M; ++j) noise_[j] *= sigma_[j];
        }
    }

    void set_noise(std::span<const double> noise) { std::copy(noise.begin(), noise.end(), noise_.begin()); }
    void clear_noise() { std::fill(noise_.begin(), noise_.end(), 0.0); }

    std::span<const double> evaluate_reaction(std::span<const double> x)
    {
        for (std::size_t j = 0; j <= grid_.M; ++j) reaction_[j] = model_.reaction(x[j]);
        return reaction_;
    }

    // x <- one step from time t; evaluate_reaction(x) must have been called.
    void advance(std::span<double> x, double t)
    {
        const double dt = grid_.dt();
        const std::size_t m = grid_.M;
        drift_[0] = 0.0;
        drift_[m] = 0.0;
        if (model_.theta.is_constant()) {
            const double scale = dt * model_.theta.constant_value();
            for (std::size_t j = 1; j < m; ++j) drift_[j] = x[j] + scale * reaction_[j] + noise_[j];
        } else {
            for (std::size_t j = 1; j < m; ++j) {
                drift_[j] = x[j] + dt * model_.theta(grid_.node(j), t) * reaction_[j] + noise_[j];
            }
        }
        dst_.forward(drift_, coeffs_);
        for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] *= damping_[k];
        dst_.inverse(coeffs_, x);
    }

private:
    const ModelSpec& model_;
    GridSpec grid_;
    SineTransform dst_;
    std::vector<double> sigma_;
    bool sigma_constant_ = false;
    std::vector<double> drift_;
    std::vector<double> reaction_;
    std::vector<double> noise_;
    std::vector<double> noise_coeffs_;
    std::vector<double> coeffs_;
    std::vector<double> damping_;
};

double sup_norm(std::span<const double> x)
{
    double m = 0.0;
    for (double v : x) {
        if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
        m = std::max(m, std::abs(v));
    }
    return m;
}

}  // namespace

GridField sample_noise_increment(const GridSpec& grid, std::span<const double> sigma, NormalStream& rng)
{
    grid.validate();
    require(sigma.size() == grid.M + 1, "sample_noise_increment: sigma needs M + 1 nodal values");
    SineTransform dst(grid.M, grid.length);
    std::vector<double> coeffs(grid.M - 1);
    const double sd = std::sqrt(grid.dt());
    for (double& c : coeffs) c = sd * rng();
    GridField out{std::vector<double>(grid.M + 1)};
    dst.inverse(coeffs, out.values);
    for (std::size_t j = 0; j <= grid.M; ++j) out.values[j] *= sigma[j];
    return out;
}

GridField step(const ModelSpec& model, const GridSpec& grid, const GridField& x, double t, const GridField& noise)
{
    model.validate_for(grid);
    require(x.values.size() == grid.M + 1 && noise.values.size() == grid.M + 1,
            "step: state and noise need M + 1 nodal values");
    require(std::abs(x.values.front()) <= 1e-12 && std::abs(x.values.back()) <= 1e-12,
            "step: state must satisfy the Dirichlet boundary");
    Stepper stepper(model, grid);
    stepper.set_noise(noise.values);
    GridField out = x;
    stepper.evaluate_reaction(out.values);
    stepper.advance(out.values, t);
    return out;
}

void check_stability(const ModelSpec& model, const GridSpec& grid)
{
    if (!model.reaction.has_derivative()) return;
    double theta_max = 0.0;
    for (std::size_t j = 0; j <= grid.M; ++j) {
        for (double t : {0.0, 0.5 * grid.horizon, grid.horizon}) {
            theta_max = std::max(theta_max, std::abs(model.theta(grid.node(j), t)));
        }
    }
    const double amplification = grid.dt() * theta_max * std::abs(model.reaction.derivative(0.0));
    if (amplification >= 2.0) {
        std::ostringstream msg;
        msg << "explicit reaction step unstable: dt*sup|theta|*|f'(0)| = " << amplification
            << " >= 2; refine N or pass force";
        fail(ErrorCode::InvalidArgument, msg.str());
    }
}

void simulate_streaming(const ModelSpec& model, const GridSpec& grid, std::uint64_t seed,
                        const RowObserver& observer, const SimulationOptions& options)
{
    model.validate_for(grid);
    require(options.noise_scale >= 0.0, "noise scale must be >= 0");
    if (!options.force) check_stability(model, grid);

    Stepper stepper(model, grid);
    NormalStream rng(seed);
    std::vector<double> x = model.x0.sample(grid);
    x.front() = 0.0;
    x.back() = 0.0;
    const bool noisy = options.noise_scale > 0.0;
    if (!noisy) stepper.clear_noise();
    for (std::size_t k = 0; k < grid.N; ++k) {
        observer(k, x, stepper.evaluate_reaction(x));
        if (noisy) stepper.draw_noise(rng, options.noise_scale);
        stepper.advance(x, grid.time(k));
        if (sup_norm(x) > options.blowup_guard) {
            std::ostringstream msg;
            msg << "blow-up at step " << k + 1 << " (t = " << grid.time(k + 1) << "): sup-norm exceeds "
                << options.blowup_guard;
            throw Error(ErrorCode::BlowUp, msg.str(), k + 1);
        }
    }
    observer(grid.N, x, {});
}

Trajectory simulate(const ModelSpec& model, const GridSpec& grid, std::uint64_t seed, const SimulationOptions& options)
{
    Trajectory traj{grid, model.nu, model.dom.alpha, seed, {}};
    traj.values.resize((grid.N + 1) * (grid.M + 1));
    simulate_streaming(
        model, grid, seed,
        [&](std::size_t k, std::span<const double> row, std::span<const double>) {
            std::copy(row.begin(), row.end(), traj.row(k).begin());
        },
        options);
    return traj;
}

GridField forward_semigroup(const GridField& x, double delta, double nu, const DomainSpec& dom, ForwardPolicy policy)
{
    require(delta >= 0.0, "forward_semigroup: delta must be >= 0");
    require(nu >= 0.0, "forward_semigroup: nu must be >= 0");
    auto s = to_spectral(x, dom);
    const auto mu = fractional_eigenvalues(dom);
    for (std::size_t k = 0; k < mu.size(); ++k) s.coeffs[k] *= forward_factor(policy, nu * mu[k] * delta);
    const GridSpec grid{x.values.size() - 1, 1, dom.length, 1.0};
    return from_spectral(s, grid);
}

}  // namespace spdelab

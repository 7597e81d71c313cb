#include "spdelab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "spdelab/error.hpp"
#include "spdelab/spectral.hpp"

namespace spdelab {

namespace {

constexpr double kMinInformation = 1e-300;

}  // namespace

KnownPhysics KnownPhysics::from_model(const ModelSpec& model, ForwardPolicy forward)
{
    return {model.dom, model.nu, model.reaction, model.sigma, forward};
}

Window Window::full(double length, double horizon)
{
    return {0.5 * length, 0.5 * horizon, 1.0, 0.5 * horizon};
}

double normal_quantile(double p)
{
    require(p > 0.0 && p < 1.0, "normal_quantile: p must lie in (0, 1)");
    return boost::math::quantile(boost::math::normal_distribution<double>(0.0, 1.0), p);
}

Interval confidence_interval(double theta_hat, double fisher, double alpha_bar)
{
    require(fisher > 0.0, "confidence_interval: Fisher information must be > 0");
    require(alpha_bar > 0.0 && alpha_bar < 1.0, "confidence_interval: level alpha_bar must lie in (0, 1)");
    const double half = normal_quantile(1.0 - alpha_bar / 2.0) / std::sqrt(fisher);
    return {theta_hat - half, theta_hat + half};
}

EstimateResult finish_estimate(double numerator, double information, std::size_t increments, double alpha_bar,
                               std::optional<Window> window)
{
    if (!(information >= kMinInformation) || !std::isfinite(information)) {
        std::ostringstream msg;
        msg << "observed Fisher information " << information << " is below 1e-300; theta is not identifiable";
        fail(ErrorCode::ZeroInformation, msg.str());
    }
    EstimateResult r;
    r.theta_hat = numerator / information;
    r.fisher = information;
    r.standard_error = 1.0 / std::sqrt(information);
    r.ci = confidence_interval(r.theta_hat, information, alpha_bar);
    r.alpha_bar = alpha_bar;
    r.window = window;
    r.n_increments = increments;
    return r;
}

QuadratureRegion global_region(const GridSpec& grid)
{
    return {0, grid.M, 1, grid.N >= 1 ? grid.N - 1 : 0};
}

QuadratureRegion resolve_window(const GridSpec& grid, const Window& w)
{
    grid.validate();
    const double l = grid.length;
    const double T = grid.horizon;
    require(w.y0 > 0.0 && w.y0 < l, "window: y0 must lie inside (0, l)");
    require(w.t0 > 0.0 && w.t0 < T, "window: t0 must lie inside (0, T)");
    require(w.delta_y > 0.0 && w.delta_y <= 1.0, "window: delta_y must lie in (0, 1]");
    require(w.delta_t > 0.0 && w.delta_t <= std::min(w.t0, T - w.t0) * (1.0 + 1e-12),
            "window: delta_t must lie in (0, min(t0, T - t0)]");

    const double dy = grid.dy();
    const double a = w.y0 - w.delta_y * w.y0;
    const double b = w.y0 + w.delta_y * (l - w.y0);
    const double ytol = 1e-9 * dy;
    const double jlo = std::max(0.0, std::ceil((a - ytol) / dy));
    const double jhi = std::min(static_cast<double>(grid.M), std::floor((b + ytol) / dy));

    const double dt = grid.dt();
    const double ttol = 1e-9 * dt;
    const double klo = std::max(1.0, std::floor((w.t0 - w.delta_t + ttol) / dt) + 1.0);
    const double khi = std::min(static_cast<double>(grid.N) - 1.0, std::ceil((w.t0 + w.delta_t - ttol) / dt) - 1.0);

    if (jhi < jlo + 1.0) fail(ErrorCode::EmptyWindow, "window covers fewer than two grid nodes");
    if (khi < klo) fail(ErrorCode::EmptyWindow, "window covers no time increment");
    return {static_cast<std::size_t>(jlo), static_cast<std::size_t>(jhi), static_cast<std::size_t>(klo),
            static_cast<std::size_t>(khi)};
}

IncrementAccumulator::IncrementAccumulator(const KnownPhysics& phys, const GridSpec& grid,
                                           std::vector<QuadratureRegion> regions)
    : phys_(phys), grid_(grid), regions_(std::move(regions)), dst_(grid.M, grid.length)
{
    grid.validate();
    phys.dom.validate();
    require(phys.nu > 0.0, "estimator: nu must be > 0");
    require(phys.dom.modes <= grid.M - 1, "estimator: K exceeds M - 1");
    require(!regions_.empty(), "estimator: no quadrature region");

    node_lo_ = grid.M;
    step_lo_ = grid.N;
    for (const auto& r : regions_) {
        require(r.node_lo <= r.node_hi && r.node_hi <= grid.M, "estimator: region nodes out of range");
        node_lo_ = std::min(node_lo_, r.node_lo);
        node_hi_ = std::max(node_hi_, r.node_hi);
        step_lo_ = std::min(step_lo_, r.step_lo);
        step_hi_ = std::max(step_hi_, r.step_hi);
    }

    const auto mu = fractional_eigenvalues(phys.dom);
    factor_.resize(mu.size());
    for (std::size_t k = 0; k < mu.size(); ++k) factor_[k] = forward_factor(phys.forward, phys.nu * mu[k] * grid.dt());

    inv_sigma2_ = phys.sigma.sample(grid);
    for (double& s : inv_sigma2_) {
        require(s > 0.0, "estimator: sigma must be > 0 at every node");
        s = 1.0 / (s * s);
    }
    const std::size_t n = grid.M + 1;
    prev_.assign(n, 0.0);
    forward_.assign(n, 0.0);
    coeffs_.assign(phys.dom.modes, 0.0);
    f_.assign(n, 0.0);
    g_.assign(n, 0.0);
    residual_.assign(n, 0.0);
    numerator_.assign(regions_.size(), 0.0);
    information_.assign(regions_.size(), 0.0);
    increments_.assign(regions_.size(), 0);
}

void IncrementAccumulator::observe(std::size_t k, std::span<const double> row, std::span<const double> reaction)
{
    require(k == expected_row_, "estimator: trajectory rows must arrive in order");
    require(row.size() == grid_.M + 1, "estimator: row length differs from M + 1");
    require(reaction.empty() || reaction.size() == row.size(), "estimator: reaction row length differs from M + 1");
    if (k >= 1 && k - 1 >= step_lo_ && k - 1 <= step_hi_) accumulate_step(k - 1, row);
    std::copy(row.begin(), row.end(), prev_.begin());
    f_ready_ = !reaction.empty();
    if (f_ready_) std::copy(reaction.begin(), reaction.end(), f_.begin());
    ++expected_row_;
}

void IncrementAccumulator::accumulate_step(std::size_t k, std::span<const double> next)
{
    dst_.forward(prev_, coeffs_);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] *= factor_[i];
    dst_.inverse(coeffs_, forward_);

    if (!f_ready_)
        for (std::size_t j = node_lo_; j <= node_hi_; ++j) f_[j] = phys_.reaction(prev_[j]);
    for (std::size_t j = node_lo_; j <= node_hi_; ++j) {
        g_[j] = f_[j] * inv_sigma2_[j];
        residual_[j] = next[j] - forward_[j];
    }

    const double dy = grid_.dy();
    const double dt = grid_.dt();
    for (std::size_t i = 0; i < regions_.size(); ++i) {
        const auto& r = regions_[i];
        if (k < r.step_lo || k > r.step_hi) continue;
        double num = 0.5 * (g_[r.node_lo] * residual_[r.node_lo] + g_[r.node_hi] * residual_[r.node_hi]);
        double info = 0.5 * (g_[r.node_lo] * f_[r.node_lo] + g_[r.node_hi] * f_[r.node_hi]);
        for (std::size_t j = r.node_lo + 1; j < r.node_hi; ++j) {
            num += g_[j] * residual_[j];
            info += g_[j] * f_[j];
        }
        numerator_[i] += dy * num;
        information_[i] += dt * dy * info;
        ++increments_[i];
    }
}

void check_compatible(const Trajectory& traj, const KnownPhysics& phys)
{
    const auto& g = traj.grid;
    if (g.M < 2 || g.N < 1 || traj.values.size() != (g.N + 1) * (g.M + 1)) {
        fail(ErrorCode::GridMismatch, "trajectory values do not match its (N+1) x (M+1) grid");
    }
    if (std::abs(g.length - phys.dom.length) > 1e-12 * phys.dom.length) {
        fail(ErrorCode::GridMismatch, "trajectory domain length differs from the known physics");
    }
    if (std::abs(traj.alpha - phys.dom.alpha) > 1e-12) {
        fail(ErrorCode::GridMismatch, "trajectory fractional order differs from the known physics");
    }
    if (phys.dom.modes > g.M - 1) {
        fail(ErrorCode::GridMismatch, "spectral truncation K exceeds the trajectory's M - 1");
    }
}

namespace {

EstimateResult run_regions(const Trajectory& traj, const KnownPhysics& phys, const QuadratureRegion& region,
                           double alpha_bar, std::optional<Window> window)
{
    IncrementAccumulator acc(phys, traj.grid, {region});
    for (std::size_t k = 0; k < traj.rows(); ++k) acc.observe(k, traj.row(k));
    return finish_estimate(acc.numerator(0), acc.information(0), acc.increments(0), alpha_bar, window);
}

}  // namespace

EstimateResult estimate_global(const Trajectory& traj, const KnownPhysics& phys, double alpha_bar)
{
    check_compatible(traj, phys);
    return run_regions(traj, phys, global_region(traj.grid), alpha_bar, std::nullopt);
}

EstimateResult estimate_localized(const Trajectory& traj, const KnownPhysics& phys, const Window& window,
                                  double alpha_bar)
{
    check_compatible(traj, phys);
    return run_regions(traj, phys, resolve_window(traj.grid, window), alpha_bar, window);
}

OuSums ou_sums(std::span<const double> times, std::span<const double> path, double nu, double mu,
               ForwardPolicy policy)
{
    require(times.size() == path.size(), "ou_mle: times and path differ in length");
    require(path.size() >= 2, "ou_mle: path needs at least two observations");
    OuSums s;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        const double dt = times[k + 1] - times[k];
        require(dt > 0.0, "ou_mle: times must be strictly increasing");
        const double x = path[k];
        if (policy == ForwardPolicy::ExplicitEuler) {
            s.numerator += x * (path[k + 1] - x + nu * mu * x * dt);
        } else {
            s.numerator += x * (path[k + 1] - forward_factor(policy, nu * mu * dt) * x);
        }
        s.information += x * x * dt;
    }
    return s;
}

double ou_mle(std::span<const double> times, std::span<const double> path, double nu, double mu,
              ForwardPolicy policy)
{
    const auto s = ou_sums(times, path, nu, mu, policy);
    if (!(s.information >= kMinInformation)) {
        fail(ErrorCode::ZeroInformation, "ou_mle: sum of x_k^2 dt vanishes");
    }
    return s.numerator / s.information;
}

std::size_t default_mode_count(double nu, const DomainSpec& dom)
{
    require(nu > 0.0, "default_mode_count: nu must be > 0");
    dom.validate();
    std::size_t k = 1;
    while (k < dom.modes && nu * eigen(static_cast<long long>(k + 1), dom).mu <= 1.0) ++k;
    return k;
}

ModeAccumulator::ModeAccumulator(const KnownPhysics& phys, const GridSpec& grid, std::size_t mode_count)
    : phys_(phys), grid_(grid), modes_(mode_count), dst_(grid.M, grid.length)
{
    require(mode_count >= 1 && mode_count <= grid.M - 1, "spectral estimator: mode count must lie in [1, M - 1]");
    require(phys.nu > 0.0, "spectral estimator: nu must be > 0");
    coeffs_.assign(modes_, 0.0);
    paths_.assign(modes_ * (grid.N + 1), 0.0);
}

void ModeAccumulator::observe(std::size_t k, std::span<const double> row)
{
    require(k == expected_row_, "spectral estimator: trajectory rows must arrive in order");
    dst_.forward(row, coeffs_);
    for (std::size_t m = 0; m < modes_; ++m) paths_[m * (grid_.N + 1) + k] = coeffs_[m];
    ++expected_row_;
}

std::span<const double> ModeAccumulator::path(std::size_t mode) const
{
    require(mode >= 1 && mode <= modes_, "spectral estimator: mode out of range");
    return {paths_.data() + (mode - 1) * (grid_.N + 1), grid_.N + 1};
}

EstimateResult ModeAccumulator::finish(double alpha_bar) const
{
    require(expected_row_ == grid_.N + 1, "spectral estimator: trajectory incomplete");
    std::vector<double> times(grid_.N + 1);
    for (std::size_t k = 0; k <= grid_.N; ++k) times[k] = grid_.time(k);
    double numerator = 0.0;
    double information = 0.0;
    for (std::size_t m = 1; m <= modes_; ++m) {
        const double mu = eigen(static_cast<long long>(m), phys_.dom).mu;
        const auto s = ou_sums(times, path(m), phys_.nu, mu);
        numerator += s.numerator;
        information += s.information;
    }
    return finish_estimate(numerator, information, grid_.N, alpha_bar);
}

EstimateResult estimate_spectral(const Trajectory& traj, const KnownPhysics& phys, std::size_t mode_count,
                                 double alpha_bar)
{
    check_compatible(traj, phys);
    require(phys.reaction.is_linear(), "spectral estimator requires the linear reaction f(x) = x");
    const auto sigma = phys.sigma.sample(traj.grid);
    require(std::all_of(sigma.begin(), sigma.end(), [&](double s) { return s == sigma[0]; }),
            "spectral estimator requires a constant noise level");
    ModeAccumulator acc(phys, traj.grid, mode_count);
    for (std::size_t k = 0; k < traj.rows(); ++k) acc.observe(k, traj.row(k));
    return acc.finish(alpha_bar);
}

}  // namespace spdelab

#include "spdelab/nonparametric.hpp"

#include <algorithm>
#include <cmath>

#include "spdelab/spectral.hpp"

namespace spdelab {

double effective_smoothness(double eta_y, double eta_t)
{
    require(eta_y > 0.0 && eta_t > 0.0, "Hölder exponents must be > 0");
    return 1.0 / (1.0 / eta_y + 1.0 / eta_t);
}

Bandwidths optimal_bandwidths(double eta_y, double eta_t, double phi_value)
{
    require(phi_value > 1.0, "optimal_bandwidths: phi must exceed 1");
    const double eff = effective_smoothness(eta_y, eta_t);
    const double denom = 2.0 * eff + 1.0;
    return {std::pow(phi_value, -eff / (eta_y * denom)), std::pow(phi_value, -eff / (eta_t * denom)), eff};
}

double nonparametric_rate_exponent(double eta_y, double eta_t)
{
    const double eff = effective_smoothness(eta_y, eta_t);
    return eff / (2.0 * eff + 1.0);
}

Bandwidths requested_bandwidths(const NonparamSpec& spec, const KnownPhysics& phys, double horizon)
{
    if (spec.bandwidths) {
        Bandwidths bw = *spec.bandwidths;
        bw.eta_eff = effective_smoothness(spec.eta_y, spec.eta_t);
        return bw;
    }
    return optimal_bandwidths(spec.eta_y, spec.eta_t, phi(phys.nu, horizon, phys.dom));
}

Window clipped_window(const EvalPoint& point, const Bandwidths& bw, double horizon, bool& clipped)
{
    const double t_cap = std::min(point.t0, horizon - point.t0);
    Window w{point.y0, point.t0, std::min(bw.delta_y, 1.0), std::min(bw.delta_t, t_cap)};
    clipped = w.delta_y != bw.delta_y || w.delta_t != bw.delta_t;
    return w;
}

std::vector<PointEstimate> estimate_nonparametric(const Trajectory& traj, const KnownPhysics& phys,
                                                  const NonparamSpec& spec)
{
    check_compatible(traj, phys);
    const double horizon = traj.grid.horizon;
    const Bandwidths bw = requested_bandwidths(spec, phys, horizon);

    std::vector<PointEstimate> out(spec.points.size());
    std::vector<QuadratureRegion> regions;
    std::vector<std::size_t> owner;
    for (std::size_t i = 0; i < spec.points.size(); ++i) {
        auto& pe = out[i];
        pe.point = spec.points[i];
        pe.requested = bw;
        try {
            pe.window = clipped_window(pe.point, bw, horizon, pe.clipped);
            regions.push_back(resolve_window(traj.grid, pe.window));
            owner.push_back(i);
        } catch (const Error& e) {
            pe.error = e.code();
            pe.message = e.what();
        }
    }
    if (regions.empty()) return out;

    IncrementAccumulator acc(phys, traj.grid, regions);
    for (std::size_t k = 0; k < traj.rows(); ++k) acc.observe(k, traj.row(k));
    for (std::size_t r = 0; r < regions.size(); ++r) {
        auto& pe = out[owner[r]];
        try {
            pe.result = finish_estimate(acc.numerator(r), acc.information(r), acc.increments(r), spec.alpha_bar,
                                        pe.window);
        } catch (const Error& e) {
            pe.error = e.code();
            pe.message = e.what();
        }
    }
    return out;
}

}  // namespace spdelab

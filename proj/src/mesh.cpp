#include "spdelab/mesh.hpp"

#include <cmath>
#include <limits>

#include "spdelab/error.hpp"

namespace spdelab {

void MeshPolicy::validate() const
{
    require(beta > 1.0, "mesh policy: beta must be > 1");
    const double cap = (1.0 - 1.0 / beta) / 2.0;
    require(gamma_t > 0.0 && gamma_t < cap, "mesh policy: need 0 < gamma_t < (1 - 1/beta)/2");
    require(p_y > 0.0, "mesh policy: p_y must be > 0");
    require(gamma_y > 0.0 && gamma_y < cap - 1.0 / p_y, "mesh policy: need 0 < gamma_y < (1 - 1/beta)/2 - 1/p_y");
    require(tilde_gamma_y > 0.0 && p_y > 1.0 / tilde_gamma_y, "mesh policy: need p_y > 1/tilde_gamma_y");
}

const char* mesh_status_name(MeshStatus status)
{
    return status == MeshStatus::Pass ? "PASS" : "WARN";
}

MeshReport check_mesh(double nu, double delta_t, double delta_y, const MeshPolicy& policy)
{
    policy.validate();
    require(nu > 0.0, "check_mesh: nu must be > 0");
    require(delta_t > 0.0 && delta_y > 0.0, "check_mesh: mesh sizes must be > 0");
    MeshReport r;
    r.exponent_t = 1.0 / (2.0 * policy.beta * policy.gamma_t);
    const double s = policy.tilde_gamma_y - 1.0 / policy.p_y;
    r.exponent_y_nu = (policy.gamma_y + 1.0 / (2.0 * policy.beta)) / s;
    r.exponent_y_dt = 1.0 / s;
    r.ratio_t = delta_t / std::pow(nu, r.exponent_t);
    r.ratio_y = delta_y / (std::pow(nu, r.exponent_y_nu) * std::pow(delta_t, r.exponent_y_dt));
    r.first_increment_ratio = r.ratio_t;
    r.status = (r.ratio_t < 1.0 && r.ratio_y < 1.0) ? MeshStatus::Pass : MeshStatus::Warn;
    return r;
}

MeshReport check_mesh_time(double nu, double delta_t, const MeshPolicy& policy)
{
    MeshReport r = check_mesh(nu, delta_t, 1.0, policy);
    r.ratio_y = std::numeric_limits<double>::quiet_NaN();
    r.status = r.ratio_t < 1.0 ? MeshStatus::Pass : MeshStatus::Warn;
    return r;
}

MeshReport check_mesh(const ModelSpec& model, const GridSpec& grid, const MeshPolicy& policy)
{
    grid.validate();
    return check_mesh(model.nu, grid.dt(), grid.dy(), policy);
}

}  // namespace spdelab

#pragma once

#include "spdelab/grid.hpp"
#include "spdelab/model.hpp"

namespace spdelab {

/// Regularity exponents entering the mesh conditions for the discretized estimator.
struct MeshPolicy {
    double beta = 2.0;
    double gamma_t = 0.24;
    double gamma_y = 0.2;
    double p_y = 100.0;
    double tilde_gamma_y = 0.4;

    /// 0 < gamma_t < (1 - 1/beta)/2, 0 < gamma_y < (1 - 1/beta)/2 - 1/p_y, p_y > 1/tilde_gamma_y.
    void validate() const;
};

enum class MeshStatus { Pass, Warn };

const char* mesh_status_name(MeshStatus status);

struct MeshReport {
    /// delta_t / nu^{1/(2 beta gamma_t)}
    double ratio_t = 0.0;
    /// delta_y / (nu^{(gamma_y + 1/(2 beta)) / s} delta_t^{1/s}), s = tilde_gamma_y - 1/p_y
    double ratio_y = 0.0;
    /// First increment against the same scale; it must stay bounded below, which on a
    /// uniform grid pulls against ratio_t -> 0. Reported, not part of the status.
    double first_increment_ratio = 0.0;
    double exponent_t = 0.0;
    double exponent_y_nu = 0.0;
    double exponent_y_dt = 0.0;
    /// Pass when both ratio_t and ratio_y are below 1.
    MeshStatus status = MeshStatus::Warn;
};

MeshReport check_mesh(double nu, double delta_t, double delta_y, const MeshPolicy& policy);

/// Temporal condition only; ratio_y is NaN and the status follows ratio_t.
MeshReport check_mesh_time(double nu, double delta_t, const MeshPolicy& policy);

/// Uses dt = T/N for both the mesh and the first increment, dy = l/M.
MeshReport check_mesh(const ModelSpec& model, const GridSpec& grid, const MeshPolicy& policy);

}  // namespace spdelab

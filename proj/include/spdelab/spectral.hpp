#pragma once

#include <vector>

#include "spdelab/grid.hpp"

namespace spdelab {

/// Dirichlet Laplacian eigenvalue lambda_k = (k pi / l)^2 and its fractional
/// power mu_k = lambda_k^{alpha/2}.
struct Eigenpair {
    double lambda;
    double mu;
};

Eigenpair eigen(long long k, const DomainSpec& dom);

/// mu_1..mu_K for the domain's truncation level.
std::vector<double> fractional_eigenvalues(const DomainSpec& dom);

/// Projection onto e_1..e_K by the discrete sine transform (quadrature weight l/M).
/// Requires K <= M - 1 and boundary values within 1e-12 of zero.
SpectralField to_spectral(const GridField& g, const DomainSpec& dom);

/// Nodal evaluation of sum_k c_k e_k(y_j) on the grid.
GridField from_spectral(const SpectralField& s, const GridSpec& grid);

/// c_k -> exp(-nu mu_k t) c_k.
SpectralField apply_semigroup(const SpectralField& s, double t, double nu, const DomainSpec& dom);

/// phi(nu, t) = sum_{k<=K} int_0^t exp(-2 mu_k nu s) ds, the integrated squared
/// Hilbert-Schmidt norm of the semigroup.
double phi(double nu, double t, const DomainSpec& dom);

struct KernelValue {
    double value;
    /// Bound on the discarded modes: sum_{k>K} exp(-mu_k nu t) * 2/l.
    double tail_bound;
};

/// Heat kernel of the nu-scaled semigroup, sum_{k<=K} exp(-mu_k nu t) e_k(x) e_k(y).
KernelValue green_kernel(double t, double x, double y, double nu, const DomainSpec& dom);

}  // namespace spdelab

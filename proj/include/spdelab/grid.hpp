#pragma once

#include <cstddef>
#include <vector>

namespace spdelab {

/// Interval (0, length) carrying the Dirichlet fractional Laplacian (-Δ)^{alpha/2},
/// truncated to the first `modes` sine eigenfunctions.
struct DomainSpec {
    double length = 1.0;
    double alpha = 2.0;
    std::size_t modes = 1;

    void validate() const;

    /// Domain whose truncation matches a grid with M subintervals (K = M - 1).
    static DomainSpec for_grid(double length, double alpha, std::size_t intervals);
};

/// Uniform space-time grid y_j = j*length/M, t_k = k*horizon/N.
struct GridSpec {
    std::size_t M = 2;
    std::size_t N = 1;
    double length = 1.0;
    double horizon = 1.0;

    double dy() const { return length / static_cast<double>(M); }
    double dt() const { return horizon / static_cast<double>(N); }
    double node(std::size_t j) const { return static_cast<double>(j) * length / static_cast<double>(M); }
    double time(std::size_t k) const { return static_cast<double>(k) * horizon / static_cast<double>(N); }
    std::size_t nodes() const { return M + 1; }

    void validate() const;

    bool operator==(const GridSpec&) const = default;
};

/// Coefficients c_k with respect to e_k(x) = sqrt(2/l) sin(k*pi*x/l), k = 1..K.
struct SpectralField {
    std::vector<double> coeffs;
};

/// Nodal values at y_0..y_M.
struct GridField {
    std::vector<double> values;
};

}  // namespace spdelab

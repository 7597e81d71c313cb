#pragma once

#include <cstddef>
#include <memory>
#include <span>

namespace spdelab {

/// Discrete sine transform between nodal values on y_j = j*l/M and coefficients
/// in the orthonormal basis e_k = sqrt(2/l) sin(k*pi*x/l), k = 1..M-1.
///
/// Realized as a real FFT of the odd extension of length 2M. Plans are shared
/// process-wide; each instance owns its scratch buffers, so an instance must not
/// be used from two threads at once (create one per worker).
class SineTransform {
public:
    SineTransform(std::size_t intervals, double length);
    ~SineTransform();
    SineTransform(SineTransform&&) noexcept;
    SineTransform& operator=(SineTransform&&) noexcept;
    SineTransform(const SineTransform&) = delete;
    SineTransform& operator=(const SineTransform&) = delete;

    std::size_t intervals() const { return intervals_; }

    /// c_k = (l/M) sum_j g(y_j) e_k(y_j) for k = 1..coeffs.size(). Boundary nodes are ignored.
    void forward(std::span<const double> nodes, std::span<double> coeffs);

    /// g(y_j) = sum_k c_k e_k(y_j); coefficients beyond coeffs.size() are zero. Writes
    /// all M+1 nodes, with exact zeros at both ends.
    void inverse(std::span<const double> coeffs, std::span<double> nodes);

private:
    struct Buffers;

    std::size_t intervals_;
    double forward_scale_;
    double inverse_scale_;
    std::unique_ptr<Buffers> buffers_;
};

}  // namespace spdelab

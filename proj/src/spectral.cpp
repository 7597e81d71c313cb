#include "spdelab/spectral.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "spdelab/error.hpp"
#include "spdelab/sine_transform.hpp"

namespace spdelab {

namespace {

constexpr double kBoundaryTolerance = 1e-12;

double mode_rate(double k, const DomainSpec& dom)
{
    return std::pow(k * std::numbers::pi / dom.length, dom.alpha);
}

}  // namespace

Eigenpair eigen(long long k, const DomainSpec& dom)
{
    require(k >= 1, "eigen: mode index must be >= 1");
    dom.validate();
    const double root = static_cast<double>(k) * std::numbers::pi / dom.length;
    const double lambda = root * root;
    return {lambda, std::pow(lambda, dom.alpha / 2.0)};
}

std::vector<double> fractional_eigenvalues(const DomainSpec& dom)
{
    dom.validate();
    std::vector<double> mu(dom.modes);
    for (std::size_t k = 0; k < dom.modes; ++k) mu[k] = eigen(static_cast<long long>(k + 1), dom).mu;
    return mu;
}

SpectralField to_spectral(const GridField& g, const DomainSpec& dom)
{
    dom.validate();
    require(g.values.size() >= 3, "to_spectral: grid field needs at least 3 nodes");
    const std::size_t m = g.values.size() - 1;
    if (dom.modes > m - 1) {
        fail(ErrorCode::InvalidArgument, "to_spectral: K = " + std::to_string(dom.modes) +
                                             " exceeds M - 1 = " + std::to_string(m - 1) + " (aliasing)");
    }
    require(std::abs(g.values.front()) <= kBoundaryTolerance && std::abs(g.values.back()) <= kBoundaryTolerance,
            "to_spectral: Dirichlet boundary values must be zero");
    SineTransform dst(m, dom.length);
    SpectralField s{std::vector<double>(dom.modes)};
    dst.forward(g.values, s.coeffs);
    return s;
}

GridField from_spectral(const SpectralField& s, const GridSpec& grid)
{
    grid.validate();
    if (s.coeffs.size() > grid.M - 1) {
        fail(ErrorCode::InvalidArgument, "from_spectral: " + std::to_string(s.coeffs.size()) +
                                             " coefficients exceed M - 1 = " + std::to_string(grid.M - 1));
    }
    SineTransform dst(grid.M, grid.length);
    GridField g{std::vector<double>(grid.M + 1)};
    dst.inverse(s.coeffs, g.values);
    return g;
}

SpectralField apply_semigroup(const SpectralField& s, double t, double nu, const DomainSpec& dom)
{
    require(t >= 0.0, "apply_semigroup: t must be >= 0");
    require(nu >= 0.0, "apply_semigroup: nu must be >= 0");
    require(s.coeffs.size() == dom.modes, "apply_semigroup: coefficient count differs from K");
    const auto mu = fractional_eigenvalues(dom);
    SpectralField out{s.coeffs};
    for (std::size_t k = 0; k < mu.size(); ++k) out.coeffs[k] *= std::exp(-nu * mu[k] * t);
    return out;
}

double phi(double nu, double t, const DomainSpec& dom)
{
    require(nu > 0.0, "phi: nu must be > 0");
    require(t >= 0.0, "phi: t must be >= 0");
    dom.validate();
    double sum = 0.0;
    for (std::size_t k = 1; k <= dom.modes; ++k) {
        const double rate = 2.0 * mode_rate(static_cast<double>(k), dom) * nu;
        sum += -std::expm1(-rate * t) / rate;
    }
    return sum;
}

KernelValue green_kernel(double t, double x, double y, double nu, const DomainSpec& dom)
{
    require(t > 0.0, "green_kernel: t must be > 0");
    require(nu > 0.0, "green_kernel: nu must be > 0");
    dom.validate();
    require(x >= 0.0 && x <= dom.length && y >= 0.0 && y <= dom.length,
            "green_kernel: positions must lie in [0, l]");

    const double scale = std::numbers::pi / dom.length;
    double value = 0.0;
    for (std::size_t k = 1; k <= dom.modes; ++k) {
        const double kk = static_cast<double>(k);
        value += std::exp(-mode_rate(kk, dom) * nu * t) * (std::sin(kk * scale * x) * std::sin(kk * scale * y));
    }
    value *= 2.0 / dom.length;

    // Tail: explicit terms until negligible, then the integral bound
    // sum_{k>n} exp(-c k^a) <= exp(-c n^a) / (c a n^{a-1}).
    const double c = std::pow(scale, dom.alpha) * nu * t;
    double tail = 0.0;
    std::size_t k = dom.modes + 1;
    const std::size_t last = dom.modes + 10'000'000;
    for (; k <= last; ++k) {
        const double term = std::exp(-mode_rate(static_cast<double>(k), dom) * nu * t);
        tail += term;
        if (term <= 1e-18 * tail || term == 0.0) break;
    }
    const double n = static_cast<double>(k);
    tail += std::exp(-c * std::pow(n, dom.alpha)) / (c * dom.alpha * std::pow(n, dom.alpha - 1.0));
    return {value, tail * 2.0 / dom.length};
}

}  // namespace spdelab

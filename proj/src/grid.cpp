#include "spdelab/grid.hpp"

#include <cmath>
#include <string>

#include "spdelab/error.hpp"

namespace spdelab {

void DomainSpec::validate() const
{
    require(std::isfinite(length) && length > 0.0, "domain length must be positive");
    require(alpha > 1.0 && alpha <= 2.0, "fractional order alpha must lie in (1, 2]");
    require(modes >= 1, "spectral truncation K must be at least 1");
}

DomainSpec DomainSpec::for_grid(double length, double alpha, std::size_t intervals)
{
    require(intervals >= 2, "grid needs at least 2 subintervals");
    return DomainSpec{length, alpha, intervals - 1};
}

void GridSpec::validate() const
{
    require(M >= 2, "grid needs M >= 2 spatial subintervals");
    require(N >= 1, "grid needs N >= 1 time steps");
    require(std::isfinite(length) && length > 0.0, "grid length must be positive");
    require(std::isfinite(horizon) && horizon > 0.0, "time horizon must be positive");
}

}  // namespace spdelab

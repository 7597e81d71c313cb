#include "spdelab/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "spdelab/error.hpp"

namespace spdelab {

double pairwise_sum(std::span<const double> values)
{
    if (values.size() <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

SampleMoments moments(std::span<const double> values)
{
    require(!values.empty(), "moments: empty sample");
    const double n = static_cast<double>(values.size());
    const double mean = pairwise_sum(values) / n;
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) sq[i] = (values[i] - mean) * (values[i] - mean);
    return {mean, pairwise_sum(sq) / n};
}

double normal_cdf(double x)
{
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double ks_distance_normal(std::span<const double> sample)
{
    require(!sample.empty(), "ks_distance_normal: empty sample");
    std::vector<double> z(sample.begin(), sample.end());
    std::sort(z.begin(), z.end());
    const double n = static_cast<double>(z.size());
    double d = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double cdf = normal_cdf(z[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - cdf, cdf - static_cast<double>(i) / n});
    }
    return d;
}

RateFit fit_rate(std::span<const std::pair<double, double>> points)
{
    require(points.size() >= 3, "fit_rate: need at least three points");
    std::vector<double> x, y;
    for (const auto& [nu, mse] : points) {
        require(nu > 0.0, "fit_rate: nu must be > 0");
        require(mse > 0.0 && std::isfinite(mse), "fit_rate: MSE values must be positive");
        x.push_back(std::log(nu));
        y.push_back(std::log(mse));
    }
    const auto mx = moments(x);
    const auto my = moments(y);
    require(mx.variance > 0.0, "fit_rate: nu values must be distinct");
    std::vector<double> cross(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) cross[i] = (x[i] - mx.mean) * (y[i] - my.mean);
    const double cov = pairwise_sum(cross) / static_cast<double>(x.size());
    RateFit fit;
    fit.slope = cov / mx.variance;
    fit.intercept = my.mean - fit.slope * mx.mean;
    fit.n_points = points.size();
    if (my.variance == 0.0) {
        fit.r_squared = 1.0;
    } else {
        std::vector<double> res(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double e = y[i] - (fit.intercept + fit.slope * x[i]);
            res[i] = e * e;
        }
        const double ss_res = pairwise_sum(res) / static_cast<double>(x.size());
        fit.r_squared = std::clamp(1.0 - ss_res / my.variance, 0.0, 1.0);
    }
    return fit;
}

NormalityReport normality(std::span<const double> z)
{
    require(!z.empty(), "normality: empty sample");
    const auto m = moments(z);
    NormalityReport r;
    r.n = z.size();
    r.z_mean = m.mean;
    r.z_variance = m.variance;
    r.ks_distance = ks_distance_normal(z);
    return r;
}

}  // namespace spdelab

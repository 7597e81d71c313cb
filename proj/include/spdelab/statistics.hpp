#pragma once

#include <cstddef>
#include <span>
#include <utility>

namespace spdelab {

/// Pairwise (cascade) summation; result depends only on the order of `values`.
double pairwise_sum(std::span<const double> values);

/// Population mean and variance (divisor n).
struct SampleMoments {
    double mean = 0.0;
    double variance = 0.0;
};

SampleMoments moments(std::span<const double> values);

double normal_cdf(double x);

/// sup_x |F_n(x) - Phi(x)| for the empirical distribution of `sample`.
double ks_distance_normal(std::span<const double> sample);

/// Least squares of log(mse) on log(nu): mse ~ exp(intercept) nu^slope.
struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t n_points = 0;
};

/// Points are (nu, mse); needs at least three, all positive, with distinct nu.
RateFit fit_rate(std::span<const std::pair<double, double>> points);

/// Standardized errors z_r = fisher_r^{1/2} (theta_hat_r - theta).
struct NormalityReport {
    std::size_t n = 0;
    double coverage = 0.0;
    double z_mean = 0.0;
    double z_variance = 0.0;
    double ks_distance = 0.0;
};

NormalityReport normality(std::span<const double> z);

}  // namespace spdelab

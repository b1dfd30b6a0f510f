#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace itolab {

// Monte Carlo summary of one scalar quantity.
struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;  // sample standard deviation / sqrt(n_samples)
    std::size_t n_samples = 0;
    std::uint64_t root_seed = 0;

    double std_dev() const;
    // |std_error / mean|; infinite when mean == 0 and std_error > 0, 0 when both vanish.
    double relative_error() const;
    // mean -/+ z * std_error
    std::pair<double, double> confidence_interval(double z = 1.96) const;
    // |mean - target| <= bands * std_error + slack
    bool consistent_with(double target, double bands = 4.0, double slack = 0.0) const;
};

// Sum in index order by a fixed binary tree of Neumaier-compensated leaves.
// The tree shape depends only on the length, so the result is a pure
// function of the sequence.
double pairwise_sum(std::span<const double> values);

// Mean via pairwise_sum; standard error from the two-pass sample variance
// with the n - 1 denominator. Throws InvalidArgument for fewer than 2 samples.
McEstimate reduce(std::span<const double> samples, std::uint64_t root_seed = 0);

// Estimate of mean(a) - mean(b) from paired samples.
McEstimate reduce_difference(std::span<const double> a, std::span<const double> b,
                             std::uint64_t root_seed = 0);

struct LinearFit {
    double intercept = 0.0;
    double slope = 0.0;
    double residual_rms = 0.0;
    double slope_std_error = 0.0;
};

// Ordinary least squares y = intercept + slope * x. Needs >= 2 points and
// non-constant x.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

// Least-squares slope of y = slope * x through the origin, with optional
// weights (inverse variances). Empty weights mean unit weights.
double slope_through_origin(std::span<const double> x, std::span<const double> y,
                            std::span<const double> weights = {});

struct ConvergenceLevel {
    double resolution = 0.0;  // mesh size or step
    double error = 0.0;
};

struct ConvergenceReport {
    std::vector<ConvergenceLevel> levels;  // decreasing resolution
    double fitted_order = 0.0;             // slope of log(error) vs log(resolution)
    double fit_residual = 0.0;             // RMS deviation of the log-log fit
    double log_constant = 0.0;             // fitted intercept
};

// Throws InvalidArgument for fewer than 3 levels or non-positive
// resolutions, DegenerateFitError when an error is exactly 0.
ConvergenceReport fit_order(std::vector<ConvergenceLevel> levels);

} // namespace itolab

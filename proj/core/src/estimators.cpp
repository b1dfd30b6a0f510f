#include <itolab/estimators.hpp>

#include <itolab/error.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace itolab {

namespace {

constexpr std::size_t kLeafSize = 32;

struct Compensated {
    double sum = 0.0;
    double carry = 0.0;

    void add(double v) noexcept {
        const double t = sum + v;
        if (std::fabs(sum) >= std::fabs(v)) {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
};

Compensated tree_sum(std::span<const double> values) {
    if (values.size() <= kLeafSize) {
        Compensated acc;
        for (double v : values) {
            acc.add(v);
        }
        return acc;
    }
    const std::size_t half = values.size() / 2;
    Compensated left = tree_sum(values.first(half));
    const Compensated right = tree_sum(values.subspan(half));
    left.add(right.sum);
    left.carry += right.carry;
    return left;
}

} // namespace

double McEstimate::std_dev() const {
    return std_error * std::sqrt(static_cast<double>(n_samples));
}

double McEstimate::relative_error() const {
    if (mean == 0.0) {
        return std_error == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return std::fabs(std_error / mean);
}

std::pair<double, double> McEstimate::confidence_interval(double z) const {
    return {mean - z * std_error, mean + z * std_error};
}

bool McEstimate::consistent_with(double target, double bands, double slack) const {
    return std::fabs(mean - target) <= bands * std_error + slack;
}

double pairwise_sum(std::span<const double> values) {
    const Compensated c = tree_sum(values);
    return c.sum + c.carry;
}

McEstimate reduce(std::span<const double> samples, std::uint64_t root_seed) {
    if (samples.size() < 2) {
        throw InvalidArgument("reduce: need at least 2 samples");
    }
    const double n = static_cast<double>(samples.size());
    const double mean = pairwise_sum(samples) / n;
    std::vector<double> squares(samples.size());
    std::transform(samples.begin(), samples.end(), squares.begin(), [mean](double v) {
        const double d = v - mean;
        return d * d;
    });
    const double variance = pairwise_sum(squares) / (n - 1.0);
    return McEstimate{mean, std::sqrt(variance / n), samples.size(), root_seed};
}

McEstimate reduce_difference(std::span<const double> a, std::span<const double> b,
                             std::uint64_t root_seed) {
    if (a.size() != b.size()) {
        throw InvalidArgument("reduce_difference: sample counts differ");
    }
    std::vector<double> diff(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff[i] = a[i] - b[i];
    }
    return reduce(diff, root_seed);
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw InvalidArgument("least_squares: need >= 2 paired points");
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) {
        throw InvalidArgument("least_squares: abscissae are all equal");
    }
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(ss / n);
    fit.slope_std_error = x.size() > 2 ? std::sqrt(ss / (n - 2.0) / sxx) : 0.0;
    return fit;
}

double slope_through_origin(std::span<const double> x, std::span<const double> y,
                            std::span<const double> weights) {
    if (x.size() != y.size() || x.empty() || (!weights.empty() && weights.size() != x.size())) {
        throw InvalidArgument("slope_through_origin: mismatched inputs");
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        sxy += w * x[i] * y[i];
        sxx += w * x[i] * x[i];
    }
    if (!(sxx > 0.0)) {
        throw InvalidArgument("slope_through_origin: abscissae are all zero");
    }
    return sxy / sxx;
}

ConvergenceReport fit_order(std::vector<ConvergenceLevel> levels) {
    if (levels.size() < 3) {
        throw InvalidArgument("fit_order: need at least 3 levels");
    }
    for (const auto& level : levels) {
        if (!(level.resolution > 0.0) || !std::isfinite(level.resolution)) {
            throw InvalidArgument("fit_order: resolutions must be positive and finite");
        }
        if (level.error == 0.0) {
            throw DegenerateFitError(
                "fit_order: an error of exactly 0 cannot be fitted; drop exact levels");
        }
        if (!(level.error > 0.0) || !std::isfinite(level.error)) {
            throw InvalidArgument("fit_order: errors must be positive and finite");
        }
    }
    std::sort(levels.begin(), levels.end(),
              [](const auto& a, const auto& b) { return a.resolution > b.resolution; });
    std::vector<double> lx, ly;
    for (const auto& level : levels) {
        lx.push_back(std::log(level.resolution));
        ly.push_back(std::log(level.error));
    }
    const LinearFit fit = least_squares(lx, ly);
    ConvergenceReport report;
    report.levels = std::move(levels);
    report.fitted_order = fit.slope;
    report.fit_residual = fit.residual_rms;
    report.log_constant = fit.intercept;
    return report;
}

} // namespace itolab

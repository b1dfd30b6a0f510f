#include <itolab/diffusion_probe.hpp>

#include <itolab/brownian_path.hpp>
#include <itolab/error.hpp>
#include <itolab/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace itolab {

namespace {

void check_close(double fd, double exact, double tol, const std::string& what) {
    const double rel = std::fabs(fd - exact) / std::max(1.0, std::fabs(exact));
    if (rel > tol) {
        std::ostringstream os;
        os << "GeneratorInput: supplied " << what << " disagrees with finite differences (exact "
           << exact << ", fd " << fd << ")";
        throw InvalidArgument(os.str());
    }
}

// Runs Euler-Maruyama from (t, x) over [t, t + h] for one stream.
std::vector<double> step_from(const Coefficients& coeffs, double t, std::span<const double> x,
                              double h, std::size_t substeps, SeedSpec seed) {
    const TimeGrid grid = make_uniform_grid(t, t + h, substeps);
    const BrownianPath path = sample_path(grid, coeffs.noise_dim, seed);
    try {
        const SolutionPath sol = euler_maruyama_from(coeffs, x, path);
        const auto end = sol.final_state();
        return {end.begin(), end.end()};
    } catch (const DivergenceError& e) {
        throw DivergenceError(e.step(), e.time(), seed.stream_id);
    }
}

} // namespace

void GeneratorInput::validate(std::size_t dim, std::uint64_t seed, std::size_t n_points, double step,
                              double tol) const {
    if (!value || !time_derivative || !gradient || !hessian) {
        throw InvalidArgument("GeneratorInput: value and all derivatives must be supplied");
    }
    RandomStream stream({seed, 0});
    std::vector<double> x(dim), grad(dim), hess(dim * dim), xp(dim);
    for (std::size_t n = 0; n < n_points; ++n) {
        const double t = stream.uniform();
        for (auto& v : x) {
            v = 4.0 * stream.uniform() - 2.0;
        }
        gradient(t, x, grad);
        hessian(t, x, hess);

        const double ft = (value(t + step, x) - value(t - step, x)) / (2.0 * step);
        check_close(ft, time_derivative(t, x), tol, "time derivative");

        for (std::size_t i = 0; i < dim; ++i) {
            xp = x;
            xp[i] = x[i] + step;
            const double fp = value(t, xp);
            xp[i] = x[i] - step;
            const double fm = value(t, xp);
            check_close((fp - fm) / (2.0 * step), grad[i], tol, "gradient");

            for (std::size_t j = 0; j < dim; ++j) {
                auto shifted = [&](double si, double sj) {
                    xp = x;
                    xp[i] += si;
                    xp[j] += sj;
                    return value(t, xp);
                };
                double fd;
                if (i == j) {
                    fd = (fp - 2.0 * value(t, x) + fm) / (step * step);
                } else {
                    fd = (shifted(step, step) - shifted(step, -step) - shifted(-step, step) +
                          shifted(-step, -step)) /
                         (4.0 * step * step);
                }
                check_close(fd, hess[i * dim + j], tol, "hessian");
            }
        }
    }
}

GeneratorInput GeneratorInput::linear_combination(double alpha, const GeneratorInput& f, double beta,
                                                  const GeneratorInput& g) {
    GeneratorInput out;
    out.value = [=](double t, std::span<const double> x) { return alpha * f.value(t, x) + beta * g.value(t, x); };
    out.time_derivative = [=](double t, std::span<const double> x) {
        return alpha * f.time_derivative(t, x) + beta * g.time_derivative(t, x);
    };
    auto combine = [alpha, beta](const Vector& a, const Vector& b) -> Vector {
        return [=](double t, std::span<const double> x, std::span<double> out) {
            std::vector<double> tmp(out.size());
            a(t, x, out);
            b(t, x, tmp);
            for (std::size_t i = 0; i < out.size(); ++i) {
                out[i] = alpha * out[i] + beta * tmp[i];
            }
        };
    };
    out.gradient = combine(f.gradient, g.gradient);
    out.hessian = combine(f.hessian, g.hessian);
    out.growth_C = std::fabs(alpha) * f.growth_C + std::fabs(beta) * g.growth_C;
    out.growth_beta = std::max(f.growth_beta, g.growth_beta);
    out.description = "linear combination of (" + f.description + ") and (" + g.description + ")";
    return out;
}

double apply_generator(const GeneratorInput& input, const Coefficients& coeffs, double t,
                       std::span<const double> x) {
    const std::size_t d = coeffs.state_dim;
    if (x.size() != d) {
        throw InvalidArgument("apply_generator: x dimension does not match the coefficients");
    }
    std::vector<double> b(d), grad(d), hess(d * d);
    coeffs.drift(t, x, b);
    input.gradient(t, x, grad);
    input.hessian(t, x, hess);
    const std::vector<double> a = coeffs.diffusion_matrix(t, x);
    double second = 0.0, first = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            second += a[i * d + j] * hess[i * d + j];
        }
        first += b[i] * grad[i];
    }
    return input.time_derivative(t, x) + 0.5 * second + first;
}

DriftDiffusionEstimate estimate_drift_diffusion(const Coefficients& coeffs, double t,
                                                std::span<const double> x, double h,
                                                std::size_t n_paths, std::uint64_t seed,
                                                std::size_t substeps) {
    coeffs.validate();
    const std::size_t d = coeffs.state_dim;
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw InvalidArgument("estimate_drift_diffusion: h must be positive");
    }
    if (x.size() != d || !std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); })) {
        throw InvalidArgument("estimate_drift_diffusion: x must be a finite d-vector");
    }
    const std::vector<double> start(x.begin(), x.end());
    std::vector<std::vector<double>> increments = parallel_map(n_paths, [&](std::size_t i) {
        std::vector<double> end = step_from(coeffs, t, start, h, substeps, {seed, i});
        for (std::size_t k = 0; k < d; ++k) {
            end[k] -= start[k];
        }
        return end;
    });

    DriftDiffusionEstimate est;
    est.h = h;
    est.dim = d;
    std::vector<double> buf(n_paths);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t n = 0; n < n_paths; ++n) {
            buf[n] = increments[n][i] / h;
        }
        est.drift.push_back(reduce(buf, seed));
    }
    est.diffusion.resize(d * d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            for (std::size_t n = 0; n < n_paths; ++n) {
                buf[n] = increments[n][i] * increments[n][j] / h;
            }
            est.diffusion[i * d + j] = reduce(buf, seed);
            est.diffusion[j * d + i] = est.diffusion[i * d + j];
        }
    }
    std::size_t far = 0;
    for (const auto& inc : increments) {
        double s = 0.0;
        for (double v : inc) {
            s += v * v;
        }
        far += std::sqrt(s) > 0.5 ? 1 : 0;
    }
    est.tail_rate = static_cast<double>(far) / static_cast<double>(n_paths) / h;
    return est;
}

bool GeneratorLimitReport::consistent(double bands) const {
    return std::all_of(levels.begin(), levels.end(), [&](const GeneratorLevel& level) {
        // Absolute floor so deterministic (zero-variance) levels compare up to rounding.
        const double floor = 1e-10 * (1.0 + std::fabs(generator_value));
        return std::fabs(level.gap - bias_slope * level.h) <= bands * level.quotient.std_error + floor;
    });
}

GeneratorLimitReport check_generator_limit(const GeneratorInput& input, const Coefficients& coeffs,
                                           double t, std::span<const double> x,
                                           std::span<const double> h_levels, std::size_t n_paths,
                                           std::uint64_t seed, std::size_t substeps) {
    coeffs.validate();
    if (h_levels.empty()) {
        throw InvalidArgument("check_generator_limit: need at least one h level");
    }
    for (std::size_t i = 0; i < h_levels.size(); ++i) {
        if (!(h_levels[i] > 0.0) || (i > 0 && !(h_levels[i] < h_levels[i - 1]))) {
            throw InvalidArgument("check_generator_limit: h levels must be positive and decreasing");
        }
    }
    const std::vector<double> start(x.begin(), x.end());
    const double f0 = input.value(t, start);

    GeneratorLimitReport report;
    report.generator_value = apply_generator(input, coeffs, t, start);
    std::vector<double> hs, gaps, weights;
    for (std::size_t level = 0; level < h_levels.size(); ++level) {
        const double h = h_levels[level];
        const std::uint64_t level_seed = derive_root(seed, level);
        const std::vector<double> quotients = parallel_map(n_paths, [&](std::size_t i) {
            const std::vector<double> end = step_from(coeffs, t, start, h, substeps, {level_seed, i});
            return (input.value(t + h, end) - f0) / h;
        });
        GeneratorLevel entry;
        entry.h = h;
        entry.quotient = reduce(quotients, level_seed);
        entry.gap = entry.quotient.mean - report.generator_value;
        report.levels.push_back(entry);
        hs.push_back(h);
        gaps.push_back(entry.gap);
        const double se = entry.quotient.std_error;
        weights.push_back(se > 0.0 ? 1.0 / (se * se) : 1e300);
    }
    report.bias_slope = slope_through_origin(hs, gaps, weights);
    return report;
}

} // namespace itolab

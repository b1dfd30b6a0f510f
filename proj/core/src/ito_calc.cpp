#include <itolab/ito_calc.hpp>

#include <itolab/error.hpp>
#include <itolab/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace itolab {

PathPrefix::PathPrefix(const BrownianPath& path, std::size_t last_index)
    : path_(&path), last_(last_index) {
    if (last_index >= path.size()) {
        throw InvalidArgument("PathPrefix: index beyond the path");
    }
}

double PathPrefix::time_at(std::size_t k) const {
    if (k > last_) {
        throw InvalidArgument("PathPrefix: time after the prefix end is not observable");
    }
    return path_->grid()[k];
}

std::span<const double> PathPrefix::at(std::size_t k) const {
    if (k > last_) {
        throw InvalidArgument("PathPrefix: value after the prefix end is not observable");
    }
    return path_->at(k);
}

double PathPrefix::value(std::size_t k, std::size_t component) const {
    return at(k)[component];
}

AdaptedProcess AdaptedProcess::scalar(std::function<double(const PathPrefix&)> fn,
                                      std::string description) {
    AdaptedProcess X;
    X.evaluator = [fn = std::move(fn)](const PathPrefix& prefix, std::span<double> out) {
        out[0] = fn(prefix);
    };
    X.description = std::move(description);
    return X;
}

AdaptedProcess AdaptedProcess::constant(double c) {
    std::ostringstream os;
    os << "X = " << c << " (bounded, in M^2)";
    return scalar([c](const PathPrefix&) { return c; }, os.str());
}

AdaptedProcess AdaptedProcess::brownian() {
    return scalar([](const PathPrefix& p) { return p.current()[0]; }, "X_s = W_s (in M^2)");
}

AdaptedProcess AdaptedProcess::identity_time() {
    return scalar([](const PathPrefix& p) { return p.time(); }, "X_s = s (deterministic, in M^2)");
}

AdaptedProcess AdaptedProcess::linear_combination(double alpha, AdaptedProcess a, double beta,
                                                  AdaptedProcess b) {
    if (a.rows != b.rows || a.cols != b.cols) {
        throw InvalidArgument("AdaptedProcess::linear_combination: shapes differ");
    }
    AdaptedProcess X;
    X.rows = a.rows;
    X.cols = a.cols;
    X.description = "linear combination of (" + a.description + ") and (" + b.description + ")";
    const std::size_t n = a.rows * a.cols;
    X.evaluator = [alpha, beta, n, fa = std::move(a.evaluator), fb = std::move(b.evaluator)](
                      const PathPrefix& prefix, std::span<double> out) {
        std::vector<double> tmp(n);
        fa(prefix, out);
        fb(prefix, tmp);
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = alpha * out[i] + beta * tmp[i];
        }
    };
    return X;
}

namespace {

std::size_t require_grid_index(const TimeGrid& grid, double t, const char* what) {
    const auto index = grid.index_of(t);
    if (!index) {
        std::ostringstream os;
        os << what << ": time " << t << " is not a grid point";
        throw InvalidArgument(os.str());
    }
    return *index;
}

std::pair<std::size_t, std::size_t> interval_indices(const BrownianPath& path, double s, double t,
                                                     std::size_t component, const char* what) {
    if (component >= path.dim()) {
        throw InvalidArgument(std::string(what) + ": component out of range");
    }
    if (!(s < t)) {
        throw InvalidArgument(std::string(what) + ": need s < t");
    }
    return {require_grid_index(path.grid(), s, what), require_grid_index(path.grid(), t, what)};
}

ItoSum integrate_until(const AdaptedProcess& X, const BrownianPath& path, std::size_t stop_index) {
    if (!X.evaluator) {
        throw InvalidArgument("ito_integral: integrand has no evaluator");
    }
    if (X.cols != path.dim()) {
        std::ostringstream os;
        os << "ito_integral: integrand has " << X.cols << " columns but the path has dimension "
           << path.dim();
        throw InvalidArgument(os.str());
    }
    const std::size_t d = X.rows;
    const std::size_t m = X.cols;
    const std::size_t n = path.grid().n_steps();
    ItoSum sum{path.grid(), d, std::vector<double>((n + 1) * d, 0.0)};
    std::vector<double> x(d * m);
    for (std::size_t k = 0; k < n; ++k) {
        double* next = sum.values.data() + (k + 1) * d;
        const double* prev = sum.values.data() + k * d;
        if (k >= stop_index) {
            std::copy(prev, prev + d, next);
            continue;
        }
        X.evaluator(PathPrefix(path, k), x);
        for (std::size_t i = 0; i < d; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                acc += x[i * m + j] * path.increment(k, j);
            }
            next[i] = prev[i] + acc;
        }
    }
    return sum;
}

double frobenius_squared(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) {
        s += v * v;
    }
    return s;
}

} // namespace

ItoSum ito_integral(const AdaptedProcess& X, const BrownianPath& path) {
    return integrate_until(X, path, path.grid().n_steps());
}

ItoSum ito_integral_stopped(const AdaptedProcess& X, const BrownianPath& path, double tau) {
    return integrate_until(X, path, path.grid().floor_index(tau));
}

double time_integral_of_norm_power(const AdaptedProcess& X, const BrownianPath& path, double q) {
    const TimeGrid& grid = path.grid();
    std::vector<double> x(X.rows * X.cols);
    double acc = 0.0;
    for (std::size_t k = 0; k < grid.n_steps(); ++k) {
        X.evaluator(PathPrefix(path, k), x);
        const double norm_sq = frobenius_squared(x);
        const double value = q == 2.0 ? norm_sq : std::pow(std::sqrt(norm_sq), q);
        acc += value * grid.step(k);
    }
    return acc;
}

double quadratic_variation(const BrownianPath& path, double s, double t, std::size_t component) {
    const auto [a, b] = interval_indices(path, s, t, component, "quadratic_variation");
    double acc = 0.0;
    for (std::size_t k = a; k < b; ++k) {
        const double dw = path.increment(k, component);
        acc += dw * dw;
    }
    return acc;
}

double total_variation(const BrownianPath& path, double s, double t, std::size_t component) {
    const auto [a, b] = interval_indices(path, s, t, component, "total_variation");
    double acc = 0.0;
    for (std::size_t k = a; k < b; ++k) {
        acc += std::fabs(path.increment(k, component));
    }
    return acc;
}

IsometryReport check_isometry(const AdaptedProcess& X, double horizon, std::size_t n_paths,
                              SeedSpec seed, std::size_t n_steps, double bands) {
    const TimeGrid grid = make_uniform_grid(0.0, horizon, n_steps);
    std::vector<double> squared(n_paths), energy(n_paths), first(n_paths);
    parallel_for(n_paths, [&](std::size_t i) {
        const BrownianPath path = sample_path(grid, X.cols, {seed.root_seed, seed.stream_id + i});
        const ItoSum sum = ito_integral(X, path);
        squared[i] = frobenius_squared(sum.final_value());
        energy[i] = time_integral_of_norm_power(X, path, 2.0);
        first[i] = sum.final_value()[0];
    });
    IsometryReport report;
    report.squared_integral = reduce(squared, seed.root_seed);
    report.integrand_energy = reduce(energy, seed.root_seed);
    report.difference = reduce_difference(squared, energy, seed.root_seed);
    report.mean_integral = reduce(first, seed.root_seed);
    report.bands = bands;
    return report;
}

double moment_inequality_constant(int p) {
    if (p < 1) {
        throw InvalidArgument("moment_inequality_constant: p must be >= 1");
    }
    const double pd = static_cast<double>(p);
    return std::pow(4.0 * pd * pd * pd / (2.0 * pd - 1.0), pd);
}

MaximalReport check_maximal_inequalities(const AdaptedProcess& X, double horizon, int p,
                                         std::size_t n_paths, SeedSpec seed, std::size_t n_steps) {
    if (p < 1) {
        throw InvalidArgument("check_maximal_inequalities: p must be >= 1");
    }
    const TimeGrid grid = make_uniform_grid(0.0, horizon, n_steps);
    const double two_p = 2.0 * p;
    std::vector<double> sup_moment(n_paths), integrand_moment(n_paths);
    parallel_for(n_paths, [&](std::size_t i) {
        const BrownianPath path = sample_path(grid, X.cols, {seed.root_seed, seed.stream_id + i});
        const ItoSum sum = ito_integral(X, path);
        double sup = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            sup = std::max(sup, frobenius_squared(sum.at(k)));
        }
        sup_moment[i] = std::pow(sup, static_cast<double>(p));
        integrand_moment[i] = time_integral_of_norm_power(X, path, two_p);
    });

    MaximalReport report;
    report.p = p;
    report.horizon = horizon;
    report.constant = moment_inequality_constant(p);
    report.sup_moment = reduce(sup_moment, seed.root_seed);
    report.integrand_moment = reduce(integrand_moment, seed.root_seed);
    report.rhs = report.constant * std::pow(horizon, p - 1.0) * report.integrand_moment.mean;
    const double rel_lhs = report.sup_moment.relative_error();
    const double rel_rhs = report.integrand_moment.relative_error();
    const double rel = std::isfinite(rel_lhs) && std::isfinite(rel_rhs)
                           ? std::sqrt(rel_lhs * rel_lhs + rel_rhs * rel_rhs)
                           : 0.0;
    report.tolerance_factor = 1.0 + 3.0 * rel;
    report.consistent = report.sup_moment.mean <= report.rhs * report.tolerance_factor;
    if (p == 1) {
        report.doob_rhs = 4.0 * report.integrand_moment.mean;
        report.doob_consistent = report.sup_moment.mean <= report.doob_rhs * report.tolerance_factor;
    }
    return report;
}

QvStudy quadratic_variation_study(double horizon, unsigned k_lo, unsigned k_hi, std::size_t n_paths,
                                  std::uint64_t root_seed) {
    if (k_hi < k_lo + 2 || k_hi > 30) {
        throw InvalidArgument("quadratic_variation_study: need k_lo + 2 <= k_hi <= 30");
    }
    QvStudy study;
    std::vector<ConvergenceLevel> fit_levels;
    for (unsigned k = k_lo; k <= k_hi; ++k) {
        const std::size_t steps = std::size_t{1} << k;
        const TimeGrid grid = make_uniform_grid(0.0, horizon, steps);
        const std::uint64_t level_seed = derive_root(root_seed, k);
        const std::vector<double> squared = parallel_map(n_paths, [&](std::size_t i) {
            const BrownianPath path = sample_path(grid, 1, {level_seed, i});
            const double err = quadratic_variation(path, 0.0, horizon) - horizon;
            return err * err;
        });
        QvLevel level;
        level.n_steps = steps;
        level.mesh = grid.mesh();
        level.squared_error = reduce(squared, level_seed);
        level.rms_error = std::sqrt(level.squared_error.mean);
        study.levels.push_back(level);
        fit_levels.push_back({level.mesh, level.rms_error});
    }
    study.fit = fit_order(std::move(fit_levels));
    return study;
}

} // namespace itolab

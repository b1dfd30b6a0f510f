#include <itolab/sde.hpp>

#include <itolab/error.hpp>
#include <itolab/ito_calc.hpp>
#include <itolab/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace itolab {

namespace {

double norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) {
        s += x * x;
    }
    return std::sqrt(s);
}

double distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

} // namespace

void Coefficients::validate() const {
    if (state_dim == 0 || noise_dim == 0) {
        throw InvalidArgument("Coefficients: dimensions must be >= 1");
    }
    if (!drift || !dispersion) {
        throw InvalidArgument("Coefficients: drift and dispersion must be set");
    }
    if (!(lipschitz_K > 0.0) || !(growth_K > 0.0)) {
        throw InvalidArgument("Coefficients: declared Lipschitz and growth constants must be positive");
    }
}

std::vector<double> Coefficients::diffusion_matrix(double t, std::span<const double> x) const {
    const std::size_t d = state_dim, m = noise_dim;
    std::vector<double> sigma(d * m), a(d * d, 0.0);
    dispersion(t, x, sigma);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double acc = 0.0;
            for (std::size_t l = 0; l < m; ++l) {
                acc += sigma[i * m + l] * sigma[j * m + l];
            }
            a[i * d + j] = acc;
            a[j * d + i] = acc;
        }
    }
    return a;
}

std::vector<std::string> SpotCheckReport::warnings(const Coefficients& coeffs) const {
    std::vector<std::string> out;
    if (lipschitz_violations > 0) {
        std::ostringstream os;
        os << coeffs.name << ": Lipschitz constant " << coeffs.lipschitz_K << " violated on "
           << lipschitz_violations << "/" << samples << " samples (worst ratio "
           << worst_lipschitz_ratio << ")";
        out.push_back(os.str());
    }
    if (growth_violations > 0) {
        std::ostringstream os;
        os << coeffs.name << ": growth constant " << coeffs.growth_K << " violated on "
           << growth_violations << "/" << samples << " samples (worst ratio " << worst_growth_ratio
           << ")";
        out.push_back(os.str());
    }
    return out;
}

SpotCheckReport spot_check(const Coefficients& coeffs, double t0, double T, std::size_t n_samples,
                           double box, std::uint64_t seed) {
    coeffs.validate();
    const std::size_t d = coeffs.state_dim, m = coeffs.noise_dim;
    RandomStream stream({seed, 0});
    std::vector<double> x(d), y(d), bx(d), by(d), sx(d * m), sy(d * m);
    SpotCheckReport report;
    report.samples = n_samples;
    for (std::size_t s = 0; s < n_samples; ++s) {
        const double t = t0 + (T - t0) * stream.uniform();
        for (std::size_t i = 0; i < d; ++i) {
            x[i] = box * (2.0 * stream.uniform() - 1.0);
            y[i] = box * (2.0 * stream.uniform() - 1.0);
        }
        coeffs.drift(t, x, bx);
        coeffs.drift(t, y, by);
        coeffs.dispersion(t, x, sx);
        coeffs.dispersion(t, y, sy);

        const double dx = distance(x, y);
        const double lip = distance(bx, by) + distance(sx, sy);
        if (dx > 0.0) {
            const double ratio = lip / dx;
            report.worst_lipschitz_ratio = std::max(report.worst_lipschitz_ratio, ratio);
            if (lip > coeffs.lipschitz_K * dx * (1.0 + 1e-12)) {
                ++report.lipschitz_violations;
            }
        }
        const double growth = norm(bx) + norm(sx);
        const double ratio = growth / (1.0 + norm(x));
        report.worst_growth_ratio = std::max(report.worst_growth_ratio, ratio);
        if (growth > coeffs.growth_K * (1.0 + norm(x)) * (1.0 + 1e-12)) {
            ++report.growth_violations;
        }
    }
    return report;
}

void SdeProblem::validate() const {
    coeffs.validate();
    if (!(T > t0)) {
        throw InvalidArgument("SdeProblem: need T > t0");
    }
    if (x0.size() != coeffs.state_dim) {
        throw InvalidArgument("SdeProblem: x0 dimension does not match the coefficients");
    }
    if (!all_finite(x0)) {
        throw InvalidArgument("SdeProblem: x0 must be finite");
    }
}

double sup_distance(const SolutionPath& a, const SolutionPath& b) {
    if (a.states.size() != b.states.size() || a.dim != b.dim) {
        throw InvalidArgument("sup_distance: solutions live on different grids");
    }
    double sup = 0.0;
    for (std::size_t k = 0; k < a.grid.size(); ++k) {
        sup = std::max(sup, distance(a.state(k), b.state(k)));
    }
    return sup;
}

SolutionPath euler_maruyama_from(const Coefficients& coeffs, std::span<const double> x_start,
                                 const BrownianPath& path) {
    const std::size_t d = coeffs.state_dim, m = coeffs.noise_dim;
    if (path.dim() != m) {
        throw InvalidArgument("euler_maruyama: path dimension does not match noise_dim");
    }
    if (x_start.size() != d) {
        throw InvalidArgument("euler_maruyama: start state dimension does not match state_dim");
    }
    const TimeGrid& grid = path.grid();
    SolutionPath sol{grid, d, std::vector<double>(grid.size() * d)};
    std::copy(x_start.begin(), x_start.end(), sol.states.begin());
    std::vector<double> b(d), sigma(d * m);
    for (std::size_t k = 0; k < grid.n_steps(); ++k) {
        const double t = grid[k];
        const double dt = grid.step(k);
        const std::span<const double> x(sol.states.data() + k * d, d);
        double* next = sol.states.data() + (k + 1) * d;
        coeffs.drift(t, x, b);
        coeffs.dispersion(t, x, sigma);
        for (std::size_t i = 0; i < d; ++i) {
            double noise = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                noise += sigma[i * m + j] * path.increment(k, j);
            }
            next[i] = x[i] + b[i] * dt + noise;
            if (!std::isfinite(next[i])) {
                throw DivergenceError(k + 1, grid[k + 1]);
            }
        }
    }
    return sol;
}

SolutionPath euler_maruyama(const SdeProblem& prob, const BrownianPath& path) {
    prob.validate();
    const TimeGrid& grid = path.grid();
    const double tol = 1e-12 * (prob.T - prob.t0);
    if (std::fabs(grid.front() - prob.t0) > tol || std::fabs(grid.back() - prob.T) > tol) {
        throw InvalidArgument("euler_maruyama: path grid must span [t0, T]");
    }
    return euler_maruyama_from(prob.coeffs, prob.x0, path);
}

SolutionPath simulate(const SdeProblem& prob, std::size_t n_steps, SeedSpec seed) {
    const TimeGrid grid = make_uniform_grid(prob.t0, prob.T, n_steps);
    try {
        return euler_maruyama(prob, sample_path(grid, prob.coeffs.noise_dim, seed));
    } catch (const DivergenceError& e) {
        throw DivergenceError(e.step(), e.time(), seed.stream_id);
    }
}

std::vector<double> constant_iterate(const TimeGrid& grid, std::span<const double> x0) {
    std::vector<double> out;
    out.reserve(grid.size() * x0.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        out.insert(out.end(), x0.begin(), x0.end());
    }
    return out;
}

std::vector<double> linear_iterate(const TimeGrid& grid, std::span<const double> x0,
                                   std::span<const double> end) {
    if (end.size() != x0.size()) {
        throw InvalidArgument("linear_iterate: endpoint dimension mismatch");
    }
    std::vector<double> out;
    out.reserve(grid.size() * x0.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double w = (grid[k] - grid.front()) / grid.span_length();
        for (std::size_t i = 0; i < x0.size(); ++i) {
            out.push_back(x0[i] + w * (end[i] - x0[i]));
        }
    }
    return out;
}

PicardResult picard_solve(const SdeProblem& prob, const BrownianPath& path, double tol,
                          std::size_t max_iter, std::optional<std::vector<double>> initial) {
    prob.validate();
    if (!(tol > 0.0)) {
        throw InvalidArgument("picard_solve: tol must be positive");
    }
    const Coefficients& coeffs = prob.coeffs;
    const std::size_t d = coeffs.state_dim, m = coeffs.noise_dim;
    if (path.dim() != m) {
        throw InvalidArgument("picard_solve: path dimension does not match noise_dim");
    }
    const TimeGrid& grid = path.grid();
    const std::size_t n = grid.n_steps();

    std::vector<double> current = initial ? std::move(*initial) : constant_iterate(grid, prob.x0);
    if (current.size() != grid.size() * d) {
        throw InvalidArgument("picard_solve: initial iterate has the wrong size");
    }

    // The Ito term of the map reads sigma along the current iterate.
    AdaptedProcess sigma_along_iterate;
    sigma_along_iterate.rows = d;
    sigma_along_iterate.cols = m;
    sigma_along_iterate.description = "sigma(s, X^(n)_s)";
    sigma_along_iterate.evaluator = [&](const PathPrefix& prefix, std::span<double> out) {
        const std::size_t k = prefix.index();
        coeffs.dispersion(prefix.time(), std::span<const double>(current.data() + k * d, d), out);
    };

    std::vector<double> differences;
    double last_ratio = 0.0;
    std::vector<double> next(current.size());
    std::vector<double> b(d);
    for (std::size_t iter = 1; iter <= max_iter; ++iter) {
        const ItoSum stochastic = ito_integral(sigma_along_iterate, path);
        std::vector<double> drift_sum(d, 0.0);
        double sup = 0.0;
        for (std::size_t k = 0; k <= n; ++k) {
            if (k > 0) {
                const std::span<const double> x(current.data() + (k - 1) * d, d);
                coeffs.drift(grid[k - 1], x, b);
                for (std::size_t i = 0; i < d; ++i) {
                    drift_sum[i] += b[i] * grid.step(k - 1);
                }
            }
            double dist_sq = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                const double value = prob.x0[i] + drift_sum[i] + stochastic.values[k * d + i];
                if (!std::isfinite(value)) {
                    throw DivergenceError(k, grid[k]);
                }
                const double diff = value - current[k * d + i];
                dist_sq += diff * diff;
                next[k * d + i] = value;
            }
            sup = std::max(sup, std::sqrt(dist_sq));
        }
        if (!differences.empty() && differences.back() > 0.0) {
            last_ratio = sup / differences.back();
        }
        differences.push_back(sup);
        current.swap(next);
        if (sup < tol) {
            return PicardResult{SolutionPath{grid, d, std::move(current)}, iter, std::move(differences),
                                last_ratio};
        }
    }
    throw NonConvergenceError(max_iter, differences.back(), last_ratio);
}

UniquenessReport uniqueness_check(const SdeProblem& prob, SeedSpec seed, std::size_t n_grids,
                                  double tol, std::size_t max_iter) {
    prob.validate();
    UniquenessReport report;
    report.tol = tol;
    std::vector<double> end(prob.x0);
    const bool at_origin = std::all_of(end.begin(), end.end(), [](double v) { return v == 0.0; });
    for (double& v : end) {
        v = at_origin ? v + 1.0 : 2.0 * v;
    }
    for (std::size_t g = 0; g < n_grids; ++g) {
        const std::size_t steps = std::size_t{256} << g;
        const SeedSpec grid_seed{derive_root(seed.root_seed, g), seed.stream_id};
        const TimeGrid grid = make_uniform_grid(prob.t0, prob.T, steps);
        const BrownianPath path = sample_path(grid, prob.coeffs.noise_dim, grid_seed);
        const PicardResult a = picard_solve(prob, path, tol, max_iter, constant_iterate(grid, prob.x0));
        const PicardResult b = picard_solve(prob, path, tol, max_iter, linear_iterate(grid, prob.x0, end));
        const double dist = sup_distance(a.solution, b.solution);
        report.grid_steps.push_back(steps);
        report.distances.push_back(dist);
        report.max_distance = std::max(report.max_distance, dist);
        if (dist > 10.0 * tol && report.passed) {
            report.passed = false;
            report.offending_seed = grid_seed;
        }
    }
    return report;
}

MomentReport moment_probe(const SdeProblem& prob, int p, std::size_t n_paths, SeedSpec seed,
                          std::size_t n_steps) {
    prob.validate();
    if (p < 1) {
        throw InvalidArgument("moment_probe: p must be >= 1");
    }
    if (n_steps < 16 || (n_steps & (n_steps - 1)) != 0) {
        throw InvalidArgument("moment_probe: n_steps must be a power of two >= 16");
    }
    constexpr std::size_t kLevels = 4;
    const TimeGrid grid = make_uniform_grid(prob.t0, prob.T, n_steps);
    const double pd = static_cast<double>(p);

    std::vector<double> sup_moment(n_paths);
    std::vector<std::vector<double>> inc(kLevels, std::vector<double>(n_paths));
    std::vector<std::vector<double>> sup_inc(kLevels, std::vector<double>(n_paths));
    parallel_for(n_paths, [&](std::size_t i) {
        const SeedSpec s{seed.root_seed, seed.stream_id + i};
        SolutionPath sol = [&] {
            try {
                return euler_maruyama(prob, sample_path(grid, prob.coeffs.noise_dim, s));
            } catch (const DivergenceError& e) {
                throw DivergenceError(e.step(), e.time(), s.stream_id);
            }
        }();
        double sup = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            sup = std::max(sup, norm(sol.state(k)));
        }
        sup_moment[i] = std::pow(sup, 2.0 * pd);
        for (std::size_t j = 0; j < kLevels; ++j) {
            const std::size_t start = n_steps - (n_steps >> (j + 1));
            double sup_d = 0.0;
            for (std::size_t k = start; k <= n_steps; ++k) {
                sup_d = std::max(sup_d, distance(sol.state(k), sol.state(start)));
            }
            inc[j][i] = std::pow(distance(sol.final_state(), sol.state(start)), 2.0 * pd);
            sup_inc[j][i] = std::pow(sup_d, 2.0 * pd);
        }
    });

    MomentReport report;
    report.p = p;
    report.sup_moment = reduce(sup_moment, seed.root_seed);
    report.finite = std::isfinite(report.sup_moment.mean);
    std::vector<double> log_delta, log_m, log_sup;
    for (std::size_t j = 0; j < kLevels; ++j) {
        IncrementMoment level;
        level.delta = (prob.T - prob.t0) / static_cast<double>(std::size_t{2} << j);
        level.moment = reduce(inc[j], seed.root_seed);
        level.sup_moment = reduce(sup_inc[j], seed.root_seed);
        report.finite = report.finite && std::isfinite(level.moment.mean) && std::isfinite(level.sup_moment.mean);
        if (level.moment.mean > 0.0 && level.sup_moment.mean > 0.0) {
            log_delta.push_back(std::log(level.delta));
            log_m.push_back(std::log(level.moment.mean));
            log_sup.push_back(std::log(level.sup_moment.mean));
        }
        report.increments.push_back(level);
    }
    if (log_delta.size() >= 2) {
        report.fitted_exponent = least_squares(log_delta, log_m).slope;
        report.fitted_sup_exponent = least_squares(log_delta, log_sup).slope;
    }
    return report;
}

CouplingReport noise_coupling(const SdeProblem& prob, std::span<const double> x0_other,
                              const BrownianPath& path) {
    SdeProblem other = prob;
    other.x0.assign(x0_other.begin(), x0_other.end());
    const SolutionPath a = euler_maruyama(prob, path);
    const SolutionPath b = euler_maruyama(other, path);
    CouplingReport report;
    report.initial_distance = distance(prob.x0, other.x0);
    report.sup_distance = sup_distance(a, b);
    report.bound = 2.0 * std::exp(prob.coeffs.lipschitz_K * (prob.T - prob.t0)) * report.initial_distance;
    return report;
}

StrongConvergence strong_convergence(const SdeProblem& prob, const ReferenceSolution& reference,
                                     unsigned k_lo, unsigned k_hi, unsigned k_fine,
                                     std::size_t n_paths, std::uint64_t root_seed) {
    prob.validate();
    if (k_hi < k_lo + 2 || k_fine < k_hi || k_fine > 30) {
        throw InvalidArgument("strong_convergence: need k_lo + 2 <= k_hi <= k_fine <= 30");
    }
    StrongConvergence study;
    std::vector<ConvergenceLevel> fit_levels;
    const TimeGrid fine_grid = make_uniform_grid(prob.t0, prob.T, std::size_t{1} << k_fine);
    for (unsigned k = k_lo; k <= k_hi; ++k) {
        const std::uint64_t level_seed = derive_root(root_seed, k);
        const std::size_t factor = std::size_t{1} << (k_fine - k);
        const std::vector<double> errors = parallel_map(n_paths, [&](std::size_t i) {
            const SeedSpec s{level_seed, i};
            const BrownianPath fine = sample_path(fine_grid, prob.coeffs.noise_dim, s);
            const std::vector<double> exact = reference(prob, fine);
            try {
                const SolutionPath sol = euler_maruyama(prob, fine.coarsened(factor));
                return distance(sol.final_state(), exact);
            } catch (const DivergenceError& e) {
                throw DivergenceError(e.step(), e.time(), s.stream_id);
            }
        });
        StrongLevel level;
        level.n_steps = std::size_t{1} << k;
        level.dt = (prob.T - prob.t0) / static_cast<double>(level.n_steps);
        level.error = reduce(errors, level_seed);
        study.levels.push_back(level);
        fit_levels.push_back({level.dt, level.error.mean});
    }
    study.fit = fit_order(std::move(fit_levels));
    return study;
}

} // namespace itolab

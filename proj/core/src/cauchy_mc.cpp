#include <itolab/cauchy_mc.hpp>

#include <itolab/brownian_path.hpp>
#include <itolab/error.hpp>
#include <itolab/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
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

void check_inputs(const CauchyProblem& prob, double t, std::span<const double> x, std::size_t n_steps,
                  std::size_t n_paths) {
    prob.coeffs.validate();
    if (!prob.payoff) {
        throw InvalidArgument("CauchyProblem: payoff must be set");
    }
    if (!(t < prob.T) || !std::isfinite(t)) {
        throw InvalidArgument("Cauchy solve: need t < T");
    }
    if (x.size() != prob.coeffs.state_dim) {
        throw InvalidArgument("Cauchy solve: x dimension does not match the coefficients");
    }
    for (double v : x) {
        if (!std::isfinite(v)) {
            throw InvalidArgument("Cauchy solve: x must be finite");
        }
    }
    if (n_steps == 0 || n_paths < 2) {
        throw InvalidArgument("Cauchy solve: need n_steps >= 1 and n_paths >= 2");
    }
}

// value per path, or nullopt when the path diverged.
using Outcome = std::optional<double>;

PdeEstimate summarize(const std::vector<Outcome>& outcomes, double t, std::span<const double> x,
                      std::size_t n_steps, double dt, std::uint64_t root_seed) {
    std::vector<double> values;
    values.reserve(outcomes.size());
    std::size_t diverged = 0;
    std::optional<std::size_t> first_bad;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (outcomes[i]) {
            values.push_back(*outcomes[i]);
        } else {
            ++diverged;
            if (!first_bad) {
                first_bad = i;
            }
        }
    }
    if (diverged * 1000 > outcomes.size()) {
        throw DivergenceError(0, t, *first_bad);
    }
    PdeEstimate est;
    est.t = t;
    est.x.assign(x.begin(), x.end());
    est.value = reduce(values, root_seed);
    est.n_steps = n_steps;
    est.n_paths = outcomes.size();
    est.dt = dt;
    est.n_diverged = diverged;
    return est;
}

template <class Functional>
PdeEstimate solve_paths(const CauchyProblem& prob, double t, std::span<const double> x,
                        std::size_t n_steps, std::size_t n_paths, std::uint64_t root_seed,
                        Functional&& functional) {
    const TimeGrid grid = make_uniform_grid(t, prob.T, n_steps);
    const std::vector<double> start(x.begin(), x.end());
    const std::vector<Outcome> outcomes = parallel_map(n_paths, [&](std::size_t i) -> Outcome {
        const BrownianPath path = sample_path(grid, prob.coeffs.noise_dim, {root_seed, i});
        try {
            return functional(euler_maruyama_from(prob.coeffs, start, path));
        } catch (const DivergenceError&) {
            return std::nullopt;
        }
    });
    return summarize(outcomes, t, x, n_steps, grid.mesh(), root_seed);
}

} // namespace

std::string GrowthDeclaration::describe() const {
    std::ostringstream os;
    if (kind == Kind::Nonnegative) {
        os << "nonnegative";
    } else {
        os << "|g| <= " << L << "(1+|x|^" << 2.0 * lambda << ")";
    }
    return os.str();
}

CauchyValidation validate(const CauchyProblem& prob, std::size_t n_samples, double box,
                          std::uint64_t seed) {
    prob.coeffs.validate();
    if (!prob.payoff) {
        throw InvalidArgument("CauchyProblem: payoff must be set");
    }
    if (!(prob.T > 0.0)) {
        throw InvalidArgument("CauchyProblem: horizon T must be positive");
    }
    CauchyValidation out;
    out.payoff_admission = prob.payoff_growth.describe();
    out.source_admission = prob.source ? prob.source_growth.describe() : "none";
    for (auto& w : spot_check(prob.coeffs, 0.0, prob.T, n_samples, box, seed).warnings(prob.coeffs)) {
        out.warnings.push_back(std::move(w));
    }

    auto admits = [](const GrowthDeclaration& g, double value, double radius) {
        if (g.kind == GrowthDeclaration::Kind::Nonnegative) {
            return value >= 0.0;
        }
        return std::fabs(value) <= g.L * (1.0 + std::pow(radius, 2.0 * g.lambda)) * (1.0 + 1e-12);
    };

    RandomStream stream({seed, 1});
    const std::size_t d = prob.coeffs.state_dim;
    std::vector<double> x(d);
    std::size_t payoff_bad = 0, source_bad = 0;
    for (std::size_t s = 0; s < n_samples; ++s) {
        const double t = prob.T * stream.uniform();
        for (auto& v : x) {
            v = box * (2.0 * stream.uniform() - 1.0);
        }
        const double r = norm(x);
        if (prob.discount) {
            const double c = prob.discount(t, x);
            if (c < 0.0) {
                std::ostringstream os;
                os << "CauchyProblem: discount c(t,x) = " << c << " < 0 at t = " << t;
                throw InvalidArgument(os.str());
            }
        }
        if (!admits(prob.payoff_growth, prob.payoff(x), r)) {
            ++payoff_bad;
        }
        if (prob.source && !admits(prob.source_growth, prob.source(t, x), r)) {
            ++source_bad;
        }
    }
    if (payoff_bad > 0) {
        out.warnings.push_back("payoff violates its growth declaration (" + out.payoff_admission + ") on " +
                               std::to_string(payoff_bad) + " samples");
    }
    if (source_bad > 0) {
        out.warnings.push_back("source violates its growth declaration (" + out.source_admission + ") on " +
                               std::to_string(source_bad) + " samples");
    }
    return out;
}

PathFunctional feynman_kac_functional(const CauchyProblem& prob, const SolutionPath& path) {
    const TimeGrid& grid = path.grid;
    PathFunctional out;
    double exponent = 0.0;
    double discount = 1.0;
    double source = 0.0;
    for (std::size_t k = 0; k < grid.n_steps(); ++k) {
        const double tk = grid[k];
        const double dt = grid.step(k);
        const auto xk = path.state(k);
        if (prob.source) {
            source += prob.source(tk, xk) * discount * dt;
        }
        if (prob.discount) {
            exponent += prob.discount(tk, xk) * dt;
            const double next = std::exp(-exponent);
            if (discount > 0.0) {
                const double ratio = next / discount;
                out.max_discount_step_ratio = k == 0 ? ratio : std::max(out.max_discount_step_ratio, ratio);
            }
            discount = next;
        }
    }
    out.terminal_discount = discount;
    out.value = prob.payoff(path.final_state()) * discount - source;
    return out;
}

PdeEstimate kolmogorov_solve(const CauchyProblem& prob, double t, std::span<const double> x,
                             std::size_t n_steps, std::size_t n_paths, std::uint64_t root_seed) {
    check_inputs(prob, t, x, n_steps, n_paths);
    if (prob.discount || prob.source) {
        throw InvalidArgument("kolmogorov_solve: discount and source must be empty (use feynman_kac_solve)");
    }
    return solve_paths(prob, t, x, n_steps, n_paths, root_seed,
                       [&](const SolutionPath& sol) { return prob.payoff(sol.final_state()); });
}

PdeEstimate feynman_kac_solve(const CauchyProblem& prob, double t, std::span<const double> x,
                              std::size_t n_steps, std::size_t n_paths, std::uint64_t root_seed) {
    check_inputs(prob, t, x, n_steps, n_paths);
    return solve_paths(prob, t, x, n_steps, n_paths, root_seed,
                       [&](const SolutionPath& sol) { return feynman_kac_functional(prob, sol).value; });
}

double WeakBiasLadder::band(double bands) const {
    return bands * levels[0].value.std_error + std::fabs(slope) * levels[0].dt;
}

WeakBiasLadder weak_bias_ladder(const CauchyProblem& prob, double t, std::span<const double> x,
                                std::size_t n_steps, std::size_t n_paths, std::uint64_t root_seed) {
    check_inputs(prob, t, x, n_steps, n_paths);
    if (n_steps % 4 != 0) {
        throw InvalidArgument("weak_bias_ladder: n_steps must be divisible by 4");
    }
    constexpr std::array<std::size_t, 3> kFactors{1, 2, 4};
    const TimeGrid grid = make_uniform_grid(t, prob.T, n_steps);
    const std::vector<double> start(x.begin(), x.end());
    const auto per_path = parallel_map(n_paths, [&](std::size_t i) {
        std::array<Outcome, 3> out;
        const BrownianPath fine = sample_path(grid, prob.coeffs.noise_dim, {root_seed, i});
        for (std::size_t l = 0; l < kFactors.size(); ++l) {
            try {
                const BrownianPath path = kFactors[l] == 1 ? fine : fine.coarsened(kFactors[l]);
                out[l] = feynman_kac_functional(prob, euler_maruyama_from(prob.coeffs, start, path)).value;
            } catch (const DivergenceError&) {
                return std::array<Outcome, 3>{};
            }
        }
        return out;
    });
    WeakBiasLadder ladder;
    std::vector<double> dts, means;
    for (std::size_t l = 0; l < kFactors.size(); ++l) {
        std::vector<Outcome> outcomes(n_paths);
        for (std::size_t i = 0; i < n_paths; ++i) {
            outcomes[i] = per_path[i][l];
        }
        const std::size_t steps = n_steps / kFactors[l];
        ladder.levels[l] = summarize(outcomes, t, x, steps, (prob.T - t) / static_cast<double>(steps), root_seed);
        dts.push_back(ladder.levels[l].dt);
        means.push_back(ladder.levels[l].value.mean);
    }
    ladder.slope = least_squares(dts, means).slope;
    return ladder;
}

} // namespace itolab

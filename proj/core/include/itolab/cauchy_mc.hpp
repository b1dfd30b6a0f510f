#pragma once

#include <itolab/estimators.hpp>
#include <itolab/sde.hpp>

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace itolab {

// How a payoff or source term is admitted: either |g| <= L (1 + |x|^(2 lambda))
// or a nonnegativity declaration (g >= 0).
struct GrowthDeclaration {
    enum class Kind { Polynomial, Nonnegative };
    Kind kind = Kind::Polynomial;
    double L = 1.0;
    double lambda = 1.0;

    static GrowthDeclaration polynomial(double L, double lambda) { return {Kind::Polynomial, L, lambda}; }
    static GrowthDeclaration nonnegative() { return {Kind::Nonnegative, 0.0, 0.0}; }
    std::string describe() const;
};

using SpatialFn = std::function<double(std::span<const double>)>;
using SpaceTimeFn = std::function<double(double, std::span<const double>)>;

// v_t + L_t v = h + c v on [0, T) x R^d, v(T, .) = f.
struct CauchyProblem {
    Coefficients coeffs;
    double T = 1.0;
    SpatialFn payoff;  // f
    GrowthDeclaration payoff_growth;
    SpaceTimeFn discount;  // c >= 0; empty means c = 0
    SpaceTimeFn source;    // h; empty means h = 0
    GrowthDeclaration source_growth;
    std::string name;
};

struct CauchyValidation {
    std::vector<std::string> warnings;
    std::string payoff_admission;  // which growth alternative was used
    std::string source_admission;
};

// Spot-checks on n_samples points of [0, T] x [-box, box]^d. A negative
// discount throws InvalidArgument; growth-declaration and coefficient
// violations become warnings.
CauchyValidation validate(const CauchyProblem& prob, std::size_t n_samples = 1000, double box = 5.0,
                          std::uint64_t seed = 0xca0c4);

// Monte Carlo solution at (t, x). Path i uses stream (root_seed, i).
struct PdeEstimate {
    double t = 0.0;
    std::vector<double> x;
    McEstimate value;
    std::size_t n_steps = 0;
    std::size_t n_paths = 0;
    double dt = 0.0;
    std::size_t n_diverged = 0;  // excluded from the mean and reported here
};

// u(t, x) = E f(X_T^{t,x}). Requires an empty discount and source.
// More than 0.1% diverged paths throws DivergenceError (first offending stream).
PdeEstimate kolmogorov_solve(const CauchyProblem& prob, double t, std::span<const double> x,
                             std::size_t n_steps, std::size_t n_paths, std::uint64_t root_seed);

// v(t, x) = E[f(X_T) Z_T - sum_k h(t_k, X_k) Z_k dt_k] with
// Z_k = exp(-sum_{j<k} c(t_j, X_j) dt_j).
PdeEstimate feynman_kac_solve(const CauchyProblem& prob, double t, std::span<const double> x,
                              std::size_t n_steps, std::size_t n_paths, std::uint64_t root_seed);

// Feynman-Kac functional of one solved path, plus its discount trajectory.
struct PathFunctional {
    double value = 0.0;
    double terminal_discount = 1.0;
    double max_discount_step_ratio = 1.0;  // max Z_{k+1}/Z_k; <= 1 means Z never increased
};
PathFunctional feynman_kac_functional(const CauchyProblem& prob, const SolutionPath& path);

// Three-level ladder at dt, 2 dt, 4 dt evaluated on the same fine noise
// (coarse paths are restrictions of the fine one). C_w is the least-squares
// slope of the level means against the step size.
struct WeakBiasLadder {
    std::array<PdeEstimate, 3> levels;
    double slope = 0.0;  // C_w

    // bands * std_error(finest) + |C_w| * dt(finest)
    double band(double bands = 4.0) const;
    const PdeEstimate& finest() const { return levels[0]; }
};

// n_steps must be divisible by 4.
WeakBiasLadder weak_bias_ladder(const CauchyProblem& prob, double t, std::span<const double> x,
                                std::size_t n_steps, std::size_t n_paths, std::uint64_t root_seed);

} // namespace itolab

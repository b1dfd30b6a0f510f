#pragma once

#include <itolab/brownian_path.hpp>
#include <itolab/estimators.hpp>
#include <itolab/rng.hpp>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace itolab {

// drift(t, x, out): out has state_dim entries.
using DriftFn = std::function<void(double, std::span<const double>, std::span<double>)>;
// dispersion(t, x, out): out is state_dim x noise_dim, row-major.
using DispersionFn = std::function<void(double, std::span<const double>, std::span<double>)>;

// Coefficients of dX = b(t,X) dt + sigma(t,X) dW together with the caller's
// declared global Lipschitz and linear-growth constants.
struct Coefficients {
    std::size_t state_dim = 1;  // d
    std::size_t noise_dim = 1;  // m
    DriftFn drift;
    DispersionFn dispersion;
    double lipschitz_K = 1.0;
    double growth_K = 1.0;
    std::string name;

    // Throws InvalidArgument for zero dims, missing functions, or
    // non-positive declared constants.
    void validate() const;

    void eval_drift(double t, std::span<const double> x, std::span<double> out) const { drift(t, x, out); }
    void eval_dispersion(double t, std::span<const double> x, std::span<double> out) const {
        dispersion(t, x, out);
    }
    // a = sigma sigma^T at (t, x), d x d row-major.
    std::vector<double> diffusion_matrix(double t, std::span<const double> x) const;
};

// Spot-check of the declared constants on random (t, x, x') from
// [t0, T] x [-box, box]^d. Violations are reported, not thrown: the constants
// are declarations.
struct SpotCheckReport {
    std::size_t samples = 0;
    std::size_t lipschitz_violations = 0;
    std::size_t growth_violations = 0;
    double worst_lipschitz_ratio = 0.0;  // max (|db| + ||dsigma||_F) / |dx|
    double worst_growth_ratio = 0.0;     // max (|b| + ||sigma||_F) / (1 + |x|)

    bool ok() const noexcept { return lipschitz_violations == 0 && growth_violations == 0; }
    std::vector<std::string> warnings(const Coefficients& coeffs) const;
};

SpotCheckReport spot_check(const Coefficients& coeffs, double t0, double T,
                           std::size_t n_samples = 1000, double box = 5.0,
                           std::uint64_t seed = 0x5eedc0ef);

struct SdeProblem {
    Coefficients coeffs;
    double t0 = 0.0;
    std::vector<double> x0;
    double T = 1.0;

    void validate() const;
};

struct SolutionPath {
    TimeGrid grid;
    std::size_t dim = 1;
    std::vector<double> states;  // row-major, one d-vector per grid point

    std::span<const double> state(std::size_t k) const noexcept { return {states.data() + k * dim, dim}; }
    std::span<const double> final_state() const noexcept { return state(grid.n_steps()); }
};

// sup over grid points of the Euclidean distance between two solutions.
double sup_distance(const SolutionPath& a, const SolutionPath& b);

// X_{k+1} = X_k + b(t_k, X_k) dt_k + sigma(t_k, X_k) dW_k on the path's grid.
// The path grid must start at t0 and end at T. Throws DivergenceError at the
// first step that produces a non-finite component.
SolutionPath euler_maruyama(const SdeProblem& prob, const BrownianPath& path);

// Same recursion starting at (t_start, x_start) over the given path, which
// may begin at any time; used by solvers that restart from (t, x).
SolutionPath euler_maruyama_from(const Coefficients& coeffs, std::span<const double> x_start,
                                 const BrownianPath& path);

struct PicardResult {
    SolutionPath solution;
    std::size_t iterations = 0;
    std::vector<double> sup_differences;  // sup_k |X^(n+1)_k - X^(n)_k| per iteration
    double last_ratio = 0.0;              // last successive-difference ratio
};

// Constant iterate X_k = x0 on the grid.
std::vector<double> constant_iterate(const TimeGrid& grid, std::span<const double> x0);
// Straight line from x0 at t0 to `end` at T.
std::vector<double> linear_iterate(const TimeGrid& grid, std::span<const double> x0,
                                   std::span<const double> end);

// Fixed-point iteration X^(n+1) = x0 + int b(s, X^(n)) ds + int sigma(s, X^(n)) dW
// on the path's grid (left-endpoint time sums, Ito sums via ito_integral),
// starting from `initial` (default: the constant x0 iterate). Stops when the
// sup-norm update is below tol. Throws NonConvergenceError after max_iter.
PicardResult picard_solve(const SdeProblem& prob, const BrownianPath& path, double tol = 1e-10,
                          std::size_t max_iter = 200,
                          std::optional<std::vector<double>> initial = std::nullopt);

struct UniquenessReport {
    bool passed = true;
    double tol = 1e-10;
    double max_distance = 0.0;
    std::vector<std::size_t> grid_steps;
    std::vector<double> distances;
    std::optional<SeedSpec> offending_seed;
};

// For n_grids dyadic grids (2^8, 2^9, ...) solves by Picard from the constant
// iterate and from the straight line to 2*x0 (x0 + 1 when x0 = 0) on the same
// noise and requires the fixed points to agree within 10 * tol.
UniquenessReport uniqueness_check(const SdeProblem& prob, SeedSpec seed, std::size_t n_grids,
                                  double tol = 1e-10, std::size_t max_iter = 200);

struct IncrementMoment {
    double delta = 0.0;
    McEstimate moment;      // E |X_T - X_{T-delta}|^(2p)
    McEstimate sup_moment;  // E sup_{T-delta <= s <= T} |X_s - X_{T-delta}|^(2p)
};

struct MomentReport {
    int p = 1;
    McEstimate sup_moment;  // E sup_{t <= T} |X_t|^(2p)
    std::vector<IncrementMoment> increments;
    double fitted_exponent = 0.0;      // slope of log moment vs log delta
    double fitted_sup_exponent = 0.0;  // same for the sup form
    bool finite = true;
};

// Euler-Maruyama over n_paths streams on a uniform grid of n_steps (a power
// of two >= 16); increment moments at delta = (T - t0) / 2^j, j = 1..4.
MomentReport moment_probe(const SdeProblem& prob, int p, std::size_t n_paths, SeedSpec seed,
                          std::size_t n_steps = 256);

struct CouplingReport {
    double initial_distance = 0.0;
    double sup_distance = 0.0;
    double bound = 0.0;  // 2 e^{K (T - t0)} |x0 - x0'|
    bool within_bound() const noexcept { return sup_distance <= bound; }
};

// Solves from x0 and x0_other on the same path and compares.
CouplingReport noise_coupling(const SdeProblem& prob, std::span<const double> x0_other,
                              const BrownianPath& path);

// Builds a uniform grid over [t0, T] with n_steps, samples the noise for
// stream `seed`, and runs Euler-Maruyama.
SolutionPath simulate(const SdeProblem& prob, std::size_t n_steps, SeedSpec seed);

// Terminal value of the exact solution driven by `fine` (a path on [t0, T]).
using ReferenceSolution = std::function<std::vector<double>(const SdeProblem&, const BrownianPath&)>;

struct StrongLevel {
    std::size_t n_steps = 0;
    double dt = 0.0;
    McEstimate error;  // E |X^EM_T - X_T|
};

struct StrongConvergence {
    std::vector<StrongLevel> levels;
    ConvergenceReport fit;
};

// Strong terminal error of Euler-Maruyama on 2^k steps, k = k_lo..k_hi. For
// each level, fresh fine paths of 2^k_fine steps (seed derive_root(root_seed, k))
// drive both the reference and, restricted to the coarse grid, the scheme.
StrongConvergence strong_convergence(const SdeProblem& prob, const ReferenceSolution& reference,
                                     unsigned k_lo, unsigned k_hi, unsigned k_fine,
                                     std::size_t n_paths, std::uint64_t root_seed);

} // namespace itolab

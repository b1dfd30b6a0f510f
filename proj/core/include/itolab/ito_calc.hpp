#pragma once

#include <itolab/brownian_path.hpp>
#include <itolab/estimators.hpp>
#include <itolab/rng.hpp>

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace itolab {

// Read-only view of a Brownian path truncated at grid index `index()`.
// Access beyond the truncation point throws, so evaluators written against
// this view cannot anticipate.
class PathPrefix {
public:
    PathPrefix(const BrownianPath& path, std::size_t last_index);

    std::size_t index() const noexcept { return last_; }
    double time() const noexcept { return path_->grid()[last_]; }
    double time_at(std::size_t k) const;
    std::size_t dim() const noexcept { return path_->dim(); }
    std::span<const double> current() const noexcept { return path_->at(last_); }
    std::span<const double> at(std::size_t k) const;
    double value(std::size_t k, std::size_t component = 0) const;
    double start_time() const noexcept { return path_->grid().front(); }

private:
    const BrownianPath* path_;
    std::size_t last_;
};

// Integrand X_t as a function of the path up to t. Values are rows x cols
// (d x m) matrices written row-major into `out`; a scalar process against a
// one-dimensional path is 1 x 1.
struct AdaptedProcess {
    using Evaluator = std::function<void(const PathPrefix&, std::span<double>)>;

    std::size_t rows = 1;
    std::size_t cols = 1;
    Evaluator evaluator;
    // Free text; also where the caller records the square-integrability
    // declaration, which cannot be checked by machine.
    std::string description;

    static AdaptedProcess scalar(std::function<double(const PathPrefix&)> fn, std::string description);
    // Convenience shapes used throughout tests and presets.
    static AdaptedProcess constant(double c);
    static AdaptedProcess brownian();   // X_s = W_s
    static AdaptedProcess identity_time();  // X_s = s

    // Pointwise alpha * a + beta * b; shapes must agree.
    static AdaptedProcess linear_combination(double alpha, AdaptedProcess a, double beta, AdaptedProcess b);
};

// Running left-endpoint sums: values[k] = sum_{j<k} X(t_j) (W(t_{j+1}) - W(t_j)),
// one rows-vector per grid point.
struct ItoSum {
    TimeGrid grid;
    std::size_t dim = 1;
    std::vector<double> values;

    std::span<const double> at(std::size_t k) const noexcept { return {values.data() + k * dim, dim}; }
    std::span<const double> final_value() const noexcept { return at(grid.n_steps()); }
    double final_scalar() const noexcept { return values[grid.n_steps() * dim]; }
};

// Throws InvalidArgument if X.cols != path.dim().
ItoSum ito_integral(const AdaptedProcess& X, const BrownianPath& path);

// Integral of X * 1_[0,tau) dW; tau is rounded down to the nearest grid point.
ItoSum ito_integral_stopped(const AdaptedProcess& X, const BrownianPath& path, double tau);

// Left-endpoint Riemann sum of ||X(t_k)||_F^q dt over the whole grid.
double time_integral_of_norm_power(const AdaptedProcess& X, const BrownianPath& path, double q);

// Sum of squared increments of `component` between grid points s < t.
// Throws InvalidArgument if s or t is not a grid point or s >= t.
double quadratic_variation(const BrownianPath& path, double s, double t, std::size_t component = 0);

// Sum of absolute increments of `component` between grid points s < t.
double total_variation(const BrownianPath& path, double s, double t, std::size_t component = 0);

struct IsometryReport {
    McEstimate squared_integral;  // E |int X dW|^2
    McEstimate integrand_energy;  // E int ||X||^2 ds
    McEstimate difference;        // paired: E[|int X dW|^2 - int ||X||^2 ds]
    McEstimate mean_integral;     // E int X dW (first component)
    double bands = 4.0;

    bool isometry_holds() const { return difference.consistent_with(0.0, bands); }
    bool zero_mean_holds() const { return mean_integral.consistent_with(0.0, bands); }
};

// Integrates X over [0, horizon] on a uniform grid of n_steps, for n_paths
// streams (seed.root_seed, seed.stream_id + i).
IsometryReport check_isometry(const AdaptedProcess& X, double horizon, std::size_t n_paths,
                              SeedSpec seed, std::size_t n_steps = 256, double bands = 4.0);

// [4p^3 / (2p - 1)]^p
double moment_inequality_constant(int p);

struct MaximalReport {
    int p = 1;
    double horizon = 1.0;
    double constant = 0.0;          // C_p
    McEstimate sup_moment;          // E sup_t |int_0^t X dW|^(2p) over grid times
    McEstimate integrand_moment;    // E int ||X||^(2p) ds
    double rhs = 0.0;               // C_p T^(p-1) E int ||X||^(2p) ds
    double doob_rhs = 0.0;          // p == 1 only: 4 E int ||X||^2 ds
    double tolerance_factor = 1.0;  // 1 + 3 * relative std error of the comparison
    bool consistent = false;        // sup_moment <= rhs * tolerance_factor
    bool doob_consistent = false;   // p == 1: sup_moment <= doob_rhs * tolerance_factor
};

MaximalReport check_maximal_inequalities(const AdaptedProcess& X, double horizon, int p,
                                         std::size_t n_paths, SeedSpec seed,
                                         std::size_t n_steps = 256);

struct QvLevel {
    std::size_t n_steps = 0;
    double mesh = 0.0;
    McEstimate squared_error;  // E |S_n - (t - s)|^2
    double rms_error = 0.0;
};

struct QvStudy {
    std::vector<QvLevel> levels;
    ConvergenceReport fit;  // RMS error vs mesh
};

// Quadratic variation over [0, horizon] on uniform grids of 2^k steps,
// k = k_lo..k_hi, with level seed derive_root(root_seed, k).
QvStudy quadratic_variation_study(double horizon, unsigned k_lo, unsigned k_hi, std::size_t n_paths,
                                  std::uint64_t root_seed);

} // namespace itolab

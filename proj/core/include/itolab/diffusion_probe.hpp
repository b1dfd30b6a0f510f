#pragma once

#include <itolab/estimators.hpp>
#include <itolab/rng.hpp>
#include <itolab/sde.hpp>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace itolab {

// Smooth test function f(t, x) with caller-supplied derivatives and a
// polynomial growth declaration |D^alpha f| <= C (1 + |x|^beta).
struct GeneratorInput {
    using Scalar = std::function<double(double, std::span<const double>)>;
    using Vector = std::function<void(double, std::span<const double>, std::span<double>)>;

    Scalar value;
    Scalar time_derivative;
    Vector gradient;  // d entries
    Vector hessian;   // d x d, row-major
    double growth_C = 1.0;
    double growth_beta = 2.0;
    std::string description;

    // Central finite-difference cross-check of the supplied derivatives at
    // n_points random (t, x) in [0,1] x [-2,2]^dim. Throws InvalidArgument
    // when the relative error |fd - exact| / max(1, |exact|) exceeds tol.
    void validate(std::size_t dim, std::uint64_t seed = 0xd1ff, std::size_t n_points = 10,
                  double step = 1e-5, double tol = 1e-5) const;

    // alpha f + beta g, derivatives combined accordingly.
    static GeneratorInput linear_combination(double alpha, const GeneratorInput& f, double beta,
                                             const GeneratorInput& g);
};

// (A f)(t, x) = df/dt + 1/2 sum a_ij d2f/dx_i dx_j + sum b_i df/dx_i, a = sigma sigma^T.
double apply_generator(const GeneratorInput& input, const Coefficients& coeffs, double t,
                       std::span<const double> x);

struct DriftDiffusionEstimate {
    double h = 0.0;
    std::size_t dim = 1;
    std::vector<McEstimate> drift;      // b_hat_i = mean(X_{t+h} - x)_i / h
    std::vector<McEstimate> diffusion;  // a_hat_ij = mean((X_{t+h}-x)_i (X_{t+h}-x)_j) / h, symmetric
    double tail_rate = 0.0;             // P(|X_{t+h} - x| > 0.5) / h, reported only

    const McEstimate& a(std::size_t i, std::size_t j) const { return diffusion[i * dim + j]; }
};

// X_{t+h} from (t, x) by Euler-Maruyama with `substeps` sub-steps of size
// h / substeps, one stream per path.
DriftDiffusionEstimate estimate_drift_diffusion(const Coefficients& coeffs, double t,
                                                std::span<const double> x, double h,
                                                std::size_t n_paths, std::uint64_t seed,
                                                std::size_t substeps = 64);

struct GeneratorLevel {
    double h = 0.0;
    McEstimate quotient;  // (E f(t+h, X_{t+h}) - f(t, x)) / h
    double gap = 0.0;     // quotient.mean - A f(t, x)
};

struct GeneratorLimitReport {
    double generator_value = 0.0;
    std::vector<GeneratorLevel> levels;  // in the order of h_levels
    double bias_slope = 0.0;             // gap ~ bias_slope * h, inverse-variance weighted

    // Every level satisfies |gap - bias_slope * h| <= bands * std_error.
    bool consistent(double bands = 4.0) const;
};

// Throws InvalidArgument unless h_levels is strictly decreasing and positive.
GeneratorLimitReport check_generator_limit(const GeneratorInput& input, const Coefficients& coeffs,
                                           double t, std::span<const double> x,
                                           std::span<const double> h_levels, std::size_t n_paths,
                                           std::uint64_t seed, std::size_t substeps = 64);

} // namespace itolab

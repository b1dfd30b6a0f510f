#pragma once

#include <itolab/cauchy_mc.hpp>
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

// Bounded open set D. `contains` is the membership predicate of D itself;
// `boundary_project(inside, outside, out)` writes the point of the boundary
// on the segment between a point of D and a point outside.
struct Domain {
    using Predicate = std::function<bool(std::span<const double>)>;
    using Projector = std::function<void(std::span<const double>, std::span<const double>, std::span<double>)>;

    std::string name;
    std::size_t dim = 1;
    Predicate contains;
    Projector boundary_project;
    std::vector<double> center;  // centre of the bounding ball
    double bounding_radius = 1.0;

    static Domain interval(double a, double b);
    static Domain box(std::vector<double> lower, std::vector<double> upper);
    static Domain ball(std::vector<double> center, double radius);

    // Checks predicate/projector consistency on n_samples random segments:
    // the projected point is not in D and stepping 1e-9 * radius back toward
    // the inside point lands in D. Throws InvalidArgument on failure.
    void check_consistency(std::uint64_t seed = 0xd0a1, std::size_t n_samples = 200) const;
};

// L u = h + c u in D, u = f on the boundary; coefficients are
// time-homogeneous (their t argument is ignored).
struct DirichletProblem {
    Coefficients coeffs;
    Domain domain;
    SpatialFn boundary_data;  // f
    SpatialFn source;         // h; empty means 0
    SpatialFn discount;       // c >= 0; empty means 0
    std::string name;
};

// min over sampled x in D of max_i a_ii(x). Positive means every coordinate
// direction diffuses, which guarantees E[tau_x] < infinity.
double ellipticity_margin(const DirichletProblem& prob, std::size_t n_samples = 1000,
                          std::uint64_t seed = 0xe111);

// 100 * bounding_radius^2 * d / ellipticity_margin.
double default_t_cap(const DirichletProblem& prob);

struct ExitSample {
    double tau = 0.0;      // crossing time refined by bisection on the last step
    double raw_tau = 0.0;  // first grid time observed outside D
    std::vector<double> exit_point;
    bool capped = false;
    std::size_t steps = 0;
    double discount = 1.0;      // exp(-int_0^tau c)
    double source_integral = 0.0;  // int_0^tau h Z ds (left-endpoint)
};

// Euler-Maruyama with step dt from x until the first state outside D, drawing
// increment k, component j from draw k*m + j of `seed`. The crossing on the
// last segment is located by bisection of the predicate (<= 60 halvings).
// Throws InvalidArgument if x is not in D or dt <= 0.
ExitSample exit_time(const DirichletProblem& prob, std::span<const double> x, double dt, SeedSpec seed,
                     double t_cap);

struct DirichletEstimate {
    PdeEstimate solution;       // u(x)
    McEstimate exit_time;       // E tau (bisection-refined)
    McEstimate raw_exit_time;   // E tau at grid resolution
    std::size_t n_capped = 0;
    double capped_fraction = 0.0;
};

// u(x) = E[f(X_tau) Z_tau - int_0^tau h(X_s) Z_s ds]. Throws ExitCapError
// when capped paths reach 0.1% of n_paths (they are excluded otherwise and
// counted in n_capped), InvalidArgument when x is outside D or the
// ellipticity probe fails. t_cap <= 0 selects default_t_cap.
DirichletEstimate dirichlet_solve(const DirichletProblem& prob, std::span<const double> x, double dt,
                                  std::size_t n_paths, std::uint64_t root_seed, double t_cap = 0.0);

} // namespace itolab

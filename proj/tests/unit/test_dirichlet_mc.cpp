#include <doctest.h>

#include <itolab/dirichlet_mc.hpp>
#include <itolab/error.hpp>

#include "oracles.hpp"

#include <algorithm>
#include <cmath>

using namespace itolab;

namespace {

DirichletProblem interval_problem(SpatialFn f, SpatialFn h = {}) {
    DirichletProblem p;
    p.coeffs = problems::brownian(1);
    p.domain = Domain::interval(-1.0, 1.0);
    p.boundary_data = std::move(f);
    p.source = std::move(h);
    p.name = "interval";
    return p;
}

SpatialFn constant(double k) {
    return [k](std::span<const double>) { return k; };
}

bool within(const McEstimate& e, double target, double dt) {
    return std::fabs(e.mean - target) <= 4.0 * e.std_error + 2.0 * std::sqrt(dt);
}

} // namespace

TEST_CASE("shipped domains are predicate/projector consistent") {
    CHECK_NOTHROW(Domain::interval(-1, 2).check_consistency());
    CHECK_NOTHROW(Domain::box({-1, 0, 2}, {1, 0.5, 3}).check_consistency());
    CHECK_NOTHROW(Domain::ball({0.5, -0.5}, 2.0).check_consistency());
    CHECK_NOTHROW(Domain::ball({0, 0, 0}, 1.0).check_consistency());
    CHECK_THROWS_AS(Domain::interval(1, 1), InvalidArgument);
    CHECK_THROWS_AS(Domain::ball({0}, -1.0), InvalidArgument);

    auto broken = Domain::interval(-1, 1);
    broken.boundary_project = [](std::span<const double>, std::span<const double>, std::span<double> out) {
        out[0] = 0.0;
    };
    CHECK_THROWS_AS(broken.check_consistency(), InvalidArgument);
}

TEST_CASE("constant boundary data is reproduced exactly") {
    const std::vector<double> x{0.2};
    const auto est = dirichlet_solve(interval_problem(constant(3.0)), x, 1e-3, 500, 1);
    CHECK(est.solution.value.mean == 3.0);
    CHECK(est.solution.value.std_error == 0.0);
    CHECK(est.n_capped == 0);
}

TEST_CASE("starting next to the boundary exits immediately") {
    const auto p = interval_problem(constant(0.0));
    const std::vector<double> x{1.0 - 1e-12};
    // Half the first steps head inward and must wander back, so only most
    // paths exit at once.
    int quick = 0;
    std::vector<double> taus;
    for (std::uint64_t i = 0; i < 100; ++i) {
        const auto s = exit_time(p, x, 1e-8, {4, i}, 10.0);
        quick += s.tau < 1e-4 ? 1 : 0;
        taus.push_back(s.tau);
        CHECK(!s.capped);
        CHECK(std::fabs(std::fabs(s.exit_point[0]) - 1.0) < 1e-9);
    }
    CHECK(quick >= 90);
    CHECK(oracle::naive_mean(taus) < 0.01);
    std::sort(taus.begin(), taus.end());
    CHECK(taus[50] < 1e-7);
}

TEST_CASE("expected exit time from the interval") {
    const double dt = 1e-3;
    for (double x0 : {0.0, 0.5}) {
        const std::vector<double> x{x0};
        const auto est = dirichlet_solve(interval_problem(constant(0.0)), x, dt, 10000, 2);
        CAPTURE(x0);
        CHECK(within(est.exit_time, 1.0 - x0 * x0, dt));
        CHECK(est.exit_time.mean <= est.raw_exit_time.mean);
        CHECK(est.capped_fraction < 1e-3);
    }
}

TEST_CASE("harmonic and source data") {
    const double dt = 1e-3;
    const std::vector<double> x{0.3};
    const auto harmonic = dirichlet_solve(interval_problem([](std::span<const double> y) { return y[0]; }), x, dt, 10000, 3);
    CHECK(within(harmonic.solution.value, 0.3, dt));

    const auto source = dirichlet_solve(interval_problem(constant(0.0), constant(-1.0)), x, dt, 10000, 4);
    CHECK(within(source.solution.value, 1.0 - 0.09, dt));
    // with h = -1 the representation is exactly the exit time
    CHECK(source.solution.value.mean == doctest::Approx(source.exit_time.mean).epsilon(1e-12));
}

TEST_CASE("expected exit time from the unit disk") {
    DirichletProblem p;
    p.coeffs = problems::brownian(2);
    p.domain = Domain::ball({0.0, 0.0}, 1.0);
    p.boundary_data = constant(0.0);
    p.source = constant(-1.0);
    const double dt = 1e-3;
    const std::vector<double> x{0.0, 0.0};
    const auto est = dirichlet_solve(p, x, dt, 10000, 5);
    CHECK(within(est.solution.value, 0.5, dt));
    const std::vector<double> off{0.6, 0.0};
    const auto est2 = dirichlet_solve(p, off, dt, 10000, 6);
    CHECK(within(est2.solution.value, 0.5 * (1 - 0.36), dt));
}

TEST_CASE("estimates respect the maximum principle") {
    auto f = [](std::span<const double> y) { return y[0] > 0 ? 2.0 : -0.5; };
    const auto p = interval_problem(f);
    for (double x0 : {-0.9, -0.3, 0.0, 0.4, 0.95}) {
        const std::vector<double> x{x0};
        const auto e = dirichlet_solve(p, x, 1e-3, 2000, 7).solution.value;
        CHECK(e.mean >= -0.5 - 4 * e.std_error);
        CHECK(e.mean <= 2.0 + 4 * e.std_error);
    }
}

TEST_CASE("discrete monitoring overshoots more at coarser steps") {
    const auto p = interval_problem(constant(0.0));
    const std::vector<double> x{0.0};
    const auto coarse = dirichlet_solve(p, x, 0.01, 20000, 8);
    const auto fine = dirichlet_solve(p, x, 0.0025, 20000, 9);
    CHECK(coarse.raw_exit_time.mean > fine.raw_exit_time.mean);
    CHECK(fine.raw_exit_time.mean > 1.0);
}

TEST_CASE("identical inputs reproduce bit-identical estimates") {
    const auto p = interval_problem([](std::span<const double> y) { return y[0] * y[0]; }, constant(0.5));
    const std::vector<double> x{-0.2};
    const auto a = dirichlet_solve(p, x, 1e-3, 3000, 10);
    const auto b = dirichlet_solve(p, x, 1e-3, 3000, 10);
    CHECK(a.solution.value.mean == b.solution.value.mean);
    CHECK(a.solution.value.std_error == b.solution.value.std_error);
    CHECK(a.exit_time.mean == b.exit_time.mean);
}

TEST_CASE("discounting shrinks the boundary payoff") {
    auto p = interval_problem(constant(1.0));
    p.discount = constant(0.5);
    const std::vector<double> x{0.0};
    const auto e = dirichlet_solve(p, x, 1e-3, 5000, 11);
    CHECK(e.solution.value.mean < 1.0);
    // E exp(-c tau) from 0 on (-1, 1) is 1 / cosh(sqrt(2c))
    CHECK(within(e.solution.value, 1.0 / std::cosh(1.0), 1e-3));
}

TEST_CASE("error conditions") {
    const auto p = interval_problem(constant(0.0));
    const std::vector<double> outside{3.0};
    CHECK_THROWS_AS(dirichlet_solve(p, outside, 1e-3, 100, 1), InvalidArgument);
    CHECK_THROWS_AS(exit_time(p, outside, 1e-3, {1, 0}, 10.0), InvalidArgument);
    const std::vector<double> x{0.0};
    CHECK_THROWS_AS(exit_time(p, x, 0.0, {1, 0}, 10.0), InvalidArgument);
    CHECK_THROWS_AS(dirichlet_solve(p, x, 1e-3, 1000, 1, 0.05), ExitCapError);

    auto frozen = p;
    frozen.coeffs = problems::zero(1);
    CHECK_THROWS_AS(dirichlet_solve(frozen, x, 1e-3, 100, 1), InvalidArgument);

    auto negative = p;
    negative.discount = constant(-1.0);
    CHECK_THROWS_AS(dirichlet_solve(negative, x, 1e-3, 100, 1), InvalidArgument);

    CHECK(ellipticity_margin(p) == doctest::Approx(1.0));
    CHECK(default_t_cap(p) == doctest::Approx(100.0));
}

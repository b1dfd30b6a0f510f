#include <doctest.h>

#include <itolab/error.hpp>
#include <itolab/estimators.hpp>
#include <itolab/rng.hpp>

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace itolab;

TEST_CASE("reduce on small inputs") {
    const std::vector<double> ones{1, 1, 1, 1};
    const auto a = reduce(ones);
    CHECK(a.mean == 1.0);
    CHECK(a.std_error == 0.0);
    CHECK(a.n_samples == 4);

    const std::vector<double> two{0, 2};
    const auto b = reduce(two, 77);
    CHECK(b.mean == 1.0);
    CHECK(b.std_error == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(b.root_seed == 77);

    const std::vector<double> one{3.0};
    CHECK_THROWS_AS(reduce(one), InvalidArgument);
    CHECK_THROWS_AS(reduce(std::vector<double>{}), InvalidArgument);
}

TEST_CASE("reduce of uniforms agrees with the oracle mean") {
    RandomStream s({1, 0});
    std::vector<double> u(1000000);
    for (auto& v : u) {
        v = s.uniform();
    }
    const auto e = reduce(u);
    CHECK(e.consistent_with(0.5));
    CHECK(e.mean == doctest::Approx(oracle::naive_mean(u)).epsilon(1e-13));
    CHECK(e.std_dev() == doctest::Approx(std::sqrt(oracle::naive_variance(u))).epsilon(1e-10));
}

TEST_CASE("compensated pairwise sum is accurate on ill-conditioned data") {
    std::vector<double> v;
    for (int i = 0; i < 1000; ++i) {
        v.push_back(1e16);
        v.push_back(1.0);
        v.push_back(-1e16);
    }
    CHECK(pairwise_sum(v) == 1000.0);
}

TEST_CASE("95% intervals cover the true mean at the nominal rate") {
    int covered = 0;
    const int reps = 10000;
    for (int r = 0; r < reps; ++r) {
        RandomStream s({3, static_cast<std::uint64_t>(r)});
        std::vector<double> x(50);
        for (auto& v : x) {
            v = 2.0 + 3.0 * s.normal();
        }
        const auto [lo, hi] = reduce(x).confidence_interval(1.96);
        covered += (lo <= 2.0 && 2.0 <= hi) ? 1 : 0;
    }
    const double rate = double(covered) / reps;
    // t vs normal quantile at n = 50 costs about 0.5% coverage
    CHECK(rate > 0.94);
    CHECK(rate < 0.96);
}

TEST_CASE("fit_order on exact power laws") {
    std::vector<ConvergenceLevel> linear, root;
    for (int k = 2; k <= 8; ++k) {
        const double h = std::ldexp(1.0, -k);
        linear.push_back({h, 3.0 * h});
        root.push_back({h, 0.7 * std::sqrt(h)});
    }
    const auto a = fit_order(linear);
    CHECK(a.fitted_order == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a.fit_residual < 1e-12);
    CHECK(a.log_constant == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    const auto b = fit_order(root);
    CHECK(b.fitted_order == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("fit_order orders levels and rejects degenerate input") {
    std::vector<ConvergenceLevel> shuffled{{0.25, 0.5}, {1.0, 1.0}, {0.0625, 0.25}};
    const auto r = fit_order(shuffled);
    CHECK(r.levels.front().resolution == 1.0);
    CHECK(r.levels.back().resolution == 0.0625);
    CHECK(r.fitted_order == doctest::Approx(0.5));

    CHECK_THROWS_AS(fit_order({{1.0, 1.0}, {0.5, 0.5}}), InvalidArgument);
    CHECK_THROWS_AS(fit_order({{1.0, 1.0}, {0.5, 0.0}, {0.25, 0.25}}), DegenerateFitError);
}

TEST_CASE("fit_order agrees with an independent log-log slope on noisy data") {
    RandomStream s({8, 0});
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<ConvergenceLevel> levels;
        std::vector<double> xs, ys;
        for (int k = 0; k < 6; ++k) {
            const double h = std::ldexp(1.0, -k);
            const double e = std::pow(h, 0.8) * std::exp(0.1 * s.normal());
            levels.push_back({h, e});
            xs.push_back(h);
            ys.push_back(e);
        }
        CHECK(fit_order(levels).fitted_order == doctest::Approx(oracle::loglog_slope(xs, ys)).epsilon(1e-10));
    }
}

TEST_CASE("least squares and weighted slope") {
    const std::vector<double> x{0, 1, 2, 3};
    const std::vector<double> y{1, 3, 5, 7};
    const auto f = least_squares(x, y);
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.residual_rms < 1e-12);

    const std::vector<double> x2{1, 2};
    const std::vector<double> y2{2, 4};
    CHECK(slope_through_origin(x2, y2) == doctest::Approx(2.0));
    const std::vector<double> y3{2, 6};
    const std::vector<double> w{1e9, 1};
    CHECK(slope_through_origin(x2, y3, w) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("paired difference estimate") {
    const std::vector<double> a{1, 2, 3, 4};
    const std::vector<double> b{1, 2, 3, 5};
    const auto d = reduce_difference(a, b);
    CHECK(d.mean == doctest::Approx(-0.25));
    CHECK(d.n_samples == 4);
}

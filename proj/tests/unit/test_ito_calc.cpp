#include <doctest.h>

#include <itolab/error.hpp>
#include <itolab/ito_calc.hpp>

#include "oracles.hpp"

#include <cmath>
#include <vector>

using namespace itolab;

TEST_CASE("trivial integrands") {
    const auto path = sample_path(make_uniform_grid(0, 1, 64), 1, {1, 0});
    const auto zero = ito_integral(AdaptedProcess::constant(0.0), path);
    for (double v : zero.values) {
        CHECK(v == 0.0);
    }
    const auto c = ito_integral(AdaptedProcess::constant(2.5), path);
    CHECK(c.values[0] == 0.0);
    CHECK(c.final_scalar() == doctest::Approx(2.5 * path.value(64)).epsilon(1e-13));
}

TEST_CASE("dimension mismatch is rejected") {
    const auto path2 = sample_path(make_uniform_grid(0, 1, 8), 2, {1, 0});
    CHECK_THROWS_AS(ito_integral(AdaptedProcess::constant(1.0), path2), InvalidArgument);
}

TEST_CASE("matrix integrand contracts against the vector increment") {
    const auto path = sample_path(make_uniform_grid(0, 1, 32), 2, {4, 1});
    AdaptedProcess X;
    X.rows = 2;
    X.cols = 2;
    X.evaluator = [](const PathPrefix& p, std::span<double> out) {
        out[0] = 1.0;
        out[1] = 2.0;
        out[2] = p.current()[0];
        out[3] = 0.0;
    };
    const auto sum = ito_integral(X, path);
    double second = 0.0;
    for (std::size_t k = 0; k < 32; ++k) {
        second += path.value(k, 0) * path.increment(k, 0);
    }
    CHECK(sum.final_value()[0] == doctest::Approx(path.value(32, 0) + 2.0 * path.value(32, 1)).epsilon(1e-12));
    CHECK(sum.final_value()[1] == doctest::Approx(second).epsilon(1e-12));
}

TEST_CASE("integral of W dW against the closed form") {
    const auto grid = make_uniform_grid(0, 1, 1u << 16);
    std::vector<double> err(200);
    for (std::size_t i = 0; i < err.size(); ++i) {
        const auto path = sample_path(grid, 1, {77, i});
        const double w1 = path.value(grid.n_steps());
        const double ito = ito_integral(AdaptedProcess::brownian(), path).final_scalar();
        err[i] = ito - (0.5 * w1 * w1 - 0.5);
        // a (b - a) = (b^2 - a^2 - (b - a)^2) / 2 summed over the grid
        const double s = quadratic_variation(path, 0.0, 1.0);
        CHECK(std::fabs(err[i]) == doctest::Approx(0.5 * std::fabs(s - 1.0)).epsilon(1e-9));
    }
    CHECK(oracle::rms(err) <= 0.02);
}

TEST_CASE("quadratic and total variation basics") {
    const auto grid = make_uniform_grid(0, 1, 8);
    const BrownianPath flat(grid, 1, std::vector<double>(9, 0.0));
    CHECK(quadratic_variation(flat, 0, 1) == 0.0);
    CHECK(total_variation(flat, 0, 1) == 0.0);
    const auto path = sample_path(grid, 1, {3, 3});
    CHECK_THROWS_AS(quadratic_variation(path, 0.1, 1.0), InvalidArgument);
    CHECK_THROWS_AS(quadratic_variation(path, 0.5, 0.5), InvalidArgument);
    CHECK_THROWS_AS(total_variation(path, 0.0, 0.3), InvalidArgument);
    double q = 0.0;
    for (std::size_t k = 2; k < 6; ++k) {
        q += path.increment(k) * path.increment(k);
    }
    CHECK(quadratic_variation(path, 0.25, 0.75) == doctest::Approx(q).epsilon(1e-14));
}

TEST_CASE("quadratic variation L2 error at mesh 2^-12") {
    const auto grid = make_uniform_grid(0, 1, 1u << 12);
    std::vector<double> err(1000);
    for (std::size_t i = 0; i < err.size(); ++i) {
        err[i] = quadratic_variation(sample_path(grid, 1, {5, i}), 0, 1) - 1.0;
    }
    CHECK(oracle::rms(err) <= 0.035);
}

TEST_CASE("quadratic variation study fits order one half") {
    const auto study = quadratic_variation_study(1.0, 6, 12, 400, 19);
    CHECK(study.levels.size() == 7);
    CHECK(study.fit.fitted_order >= 0.35);
    CHECK(study.fit.fitted_order <= 0.65);
    for (const auto& level : study.levels) {
        // E|S_n - 1|^2 = 2h exactly for uniform grids
        CHECK(level.squared_error.consistent_with(2.0 * level.mesh));
    }
}

TEST_CASE("quadratic variation settles along nested refinements") {
    int approaching = 0;
    int downward = 0;
    for (std::size_t i = 0; i < 100; ++i) {
        auto path = sample_path(make_uniform_grid(0, 1, 16), 1, {21, i});
        std::vector<double> errors{std::fabs(quadratic_variation(path, 0, 1) - 1.0)};
        std::vector<double> level_index{0.0};
        for (int r = 1; r <= 10; ++r) {
            path = refine_dyadic(path, {derive_root(21, r), i});
            errors.push_back(std::fabs(quadratic_variation(path, 0, 1) - 1.0));
            level_index.push_back(r);
        }
        approaching += errors.back() < errors.front() ? 1 : 0;
        std::vector<double> log_err;
        for (double e : errors) {
            log_err.push_back(std::log(e + 1e-300));
        }
        downward += least_squares(level_index, log_err).slope < 0.0 ? 1 : 0;
    }
    CHECK(approaching >= 90);
    CHECK(downward >= 90);
}

TEST_CASE("total variation grows like the square root of the step count") {
    std::vector<double> coarse, fine;
    int doubled = 0;
    for (std::size_t i = 0; i < 100; ++i) {
        const auto path = sample_path(make_uniform_grid(0, 1, 1u << 8), 1, {9, i});
        auto refined = refine_dyadic(path, {derive_root(9, 1), i});
        coarse.push_back(total_variation(path, 0, 1));
        fine.push_back(total_variation(refined, 0, 1));
        for (int r = 2; r <= 4; ++r) {
            refined = refine_dyadic(refined, {derive_root(9, r), i});
        }
        doubled += total_variation(refined, 0, 1) > 2.0 * coarse.back() ? 1 : 0;
    }
    const double ratio = oracle::naive_mean(fine) / oracle::naive_mean(coarse);
    CHECK(ratio >= 1.30);
    CHECK(ratio <= 1.53);
    CHECK(doubled == 100);
    // E TV = sqrt(2 n / pi)
    CHECK(oracle::naive_mean(coarse) == doctest::Approx(std::sqrt(2.0 * 256 / M_PI)).epsilon(0.02));
}

TEST_CASE("the integral never looks past the current time") {
    const auto grid = make_uniform_grid(0, 1, 64);
    const auto a = sample_path(grid, 1, {2, 0});
    std::vector<double> values(a.values().begin(), a.values().end());
    const std::size_t cut = 40;
    for (std::size_t k = cut + 1; k < values.size(); ++k) {
        values[k] += 3.0 * std::sin(double(k));
    }
    const BrownianPath b(grid, 1, values);
    const auto X = AdaptedProcess::scalar(
        [](const PathPrefix& p) {
            double m = 0.0;
            for (std::size_t k = 0; k <= p.index(); ++k) {
                m = std::max(m, p.value(k));
            }
            return m + p.time();
        },
        "running max plus time");
    const auto sa = ito_integral(X, a);
    const auto sb = ito_integral(X, b);
    for (std::size_t k = 0; k <= cut; ++k) {
        CHECK(sa.values[k] == sb.values[k]);
    }
    CHECK(sa.final_scalar() != sb.final_scalar());

    const auto cheat = AdaptedProcess::scalar([](const PathPrefix& p) { return p.value(p.index() + 1); }, "peek");
    CHECK_THROWS_AS(ito_integral(cheat, a), InvalidArgument);
}

TEST_CASE("linearity in the integrand") {
    const auto X = AdaptedProcess::brownian();
    const auto Y = AdaptedProcess::scalar([](const PathPrefix& p) { return std::cos(p.current()[0]) * p.time(); }, "cos");
    for (std::size_t i = 0; i < 20; ++i) {
        const double alpha = -2.0 + 0.3 * double(i), beta = 1.7 - 0.11 * double(i);
        const auto path = sample_path(make_uniform_grid(0, 1, 128), 1, {13, i});
        const auto combo = ito_integral(AdaptedProcess::linear_combination(alpha, X, beta, Y), path);
        const auto ix = ito_integral(X, path);
        const auto iy = ito_integral(Y, path);
        for (std::size_t k = 0; k < combo.values.size(); ++k) {
            CHECK(combo.values[k] == doctest::Approx(alpha * ix.values[k] + beta * iy.values[k]).epsilon(1e-12).scale(1.0));
        }
    }
}

TEST_CASE("stopped integral freezes after tau") {
    const auto grid = make_uniform_grid(0, 1, 10);
    const auto path = sample_path(grid, 1, {6, 0});
    const auto full = ito_integral(AdaptedProcess::brownian(), path);
    const auto stopped = ito_integral_stopped(AdaptedProcess::brownian(), path, 0.46);
    for (std::size_t k = 0; k <= 4; ++k) {
        CHECK(stopped.values[k] == full.values[k]);
    }
    for (std::size_t k = 5; k <= 10; ++k) {
        CHECK(stopped.values[k] == full.values[4]);
    }
}

TEST_CASE("martingale increments are orthogonal to the past") {
    const auto grid = make_uniform_grid(0, 1, 64);
    const std::size_t s = 24;
    std::vector<double> a(20000), b(20000);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto path = sample_path(grid, 1, {15, i});
        const auto sum = ito_integral(AdaptedProcess::brownian(), path);
        const double increment = sum.final_scalar() - sum.values[s];
        a[i] = increment * path.value(s) * path.value(s);
        b[i] = increment * (path.value(s) > 0.1 ? 1.0 : -1.0);
    }
    CHECK(reduce(a).consistent_with(0.0));
    CHECK(reduce(b).consistent_with(0.0));
}

namespace {

// RMS over paths of a pathwise residual on uniform grids of 2^k steps.
template <class Residual>
ConvergenceReport residual_order(Residual residual, unsigned k_lo, unsigned k_hi, std::size_t n_paths) {
    std::vector<ConvergenceLevel> levels;
    for (unsigned k = k_lo; k <= k_hi; ++k) {
        const auto grid = make_uniform_grid(0, 1, std::size_t{1} << k);
        std::vector<double> r(n_paths);
        for (std::size_t i = 0; i < n_paths; ++i) {
            r[i] = residual(sample_path(grid, 1, {derive_root(33, k), i}));
        }
        levels.push_back({grid.mesh(), oracle::rms(r)});
    }
    return fit_order(levels);
}

} // namespace

TEST_CASE("Ito formula residual for W^2 shrinks at order one half") {
    const auto report = residual_order(
        [](const BrownianPath& path) {
            const double w = path.value(path.grid().n_steps());
            const double two_w_dw = ito_integral(AdaptedProcess::scalar(
                                                     [](const PathPrefix& p) { return 2.0 * p.current()[0]; }, "2W"),
                                                 path)
                                        .final_scalar();
            return w * w - (1.0 + two_w_dw);
        },
        4, 12, 1000);
    CHECK(report.fitted_order >= 0.45);
    CHECK(report.fitted_order <= 0.55);
}

TEST_CASE("product rule residual shrinks at order one half") {
    // X1 = t + 2 W, X2 = 0.5 t - W: (h1, G1) = (1, 2), (h2, G2) = (0.5, -1)
    const auto report = residual_order(
        [](const BrownianPath& path) {
            const auto& g = path.grid();
            const std::size_t n = g.n_steps();
            auto x1 = [&](std::size_t k) { return g[k] + 2.0 * path.value(k); };
            auto x2 = [&](std::size_t k) { return 0.5 * g[k] - path.value(k); };
            double rhs = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                const double dt = g.step(k);
                rhs += x1(k) * (0.5 * dt) + x2(k) * dt + (2.0 * -1.0) * dt;
            }
            const auto dW1 = AdaptedProcess::scalar(
                [&](const PathPrefix& p) { return -(p.time() + 2.0 * p.current()[0]); }, "X1 G2");
            const auto dW2 = AdaptedProcess::scalar(
                [&](const PathPrefix& p) { return 2.0 * (0.5 * p.time() - p.current()[0]); }, "X2 G1");
            rhs += ito_integral(dW1, path).final_scalar() + ito_integral(dW2, path).final_scalar();
            return x1(n) * x2(n) - x1(0) * x2(0) - rhs;
        },
        4, 12, 1000);
    CHECK(report.fitted_order >= 0.45);
    CHECK(report.fitted_order <= 0.65);
}

TEST_CASE("isometry and zero mean for the standard integrands") {
    struct Case {
        AdaptedProcess X;
        double target;
    };
    const std::vector<Case> cases{{AdaptedProcess::constant(1.0), 1.0},
                                  {AdaptedProcess::brownian(), 0.5},
                                  {AdaptedProcess::identity_time(), 1.0 / 3.0}};
    const std::size_t n_steps = 128;
    for (const auto& c : cases) {
        CAPTURE(c.X.description);
        const auto r = check_isometry(c.X, 1.0, 20000, {101, 0}, n_steps);
        CHECK(r.isometry_holds());
        CHECK(r.zero_mean_holds());
        // left-rule energy differs from the integral by at most one step
        CHECK(r.integrand_energy.consistent_with(c.target, 4.0, 1.0 / n_steps));
        CHECK(r.squared_integral.consistent_with(c.target, 4.0, 1.0 / n_steps));
    }
}

TEST_CASE("maximal inequalities") {
    const auto zero = check_maximal_inequalities(AdaptedProcess::constant(0.0), 1.0, 1, 100, {1, 0});
    CHECK(zero.sup_moment.mean == 0.0);
    CHECK(zero.rhs == 0.0);
    CHECK(zero.consistent);
    CHECK(zero.doob_consistent);

    const auto one = check_maximal_inequalities(AdaptedProcess::constant(1.0), 1.0, 1, 20000, {2, 0});
    CHECK(one.doob_rhs == doctest::Approx(4.0));
    CHECK(one.doob_consistent);
    CHECK(one.consistent);
    CHECK(one.sup_moment.mean < 4.0);
    CHECK(one.sup_moment.mean > 1.0);

    CHECK(moment_inequality_constant(2) == doctest::Approx(1024.0 / 9.0).epsilon(1e-14));
    const auto two = check_maximal_inequalities(AdaptedProcess::constant(1.0), 1.0, 2, 20000, {3, 0});
    CHECK(two.rhs == doctest::Approx(1024.0 / 9.0).epsilon(1e-12));
    CHECK(two.consistent);

    for (auto X : {AdaptedProcess::brownian(), AdaptedProcess::identity_time()}) {
        const auto r = check_maximal_inequalities(X, 1.0, 1, 20000, {4, 0});
        CHECK(r.doob_consistent);
    }
    CHECK_THROWS_AS(check_maximal_inequalities(AdaptedProcess::constant(1.0), 1.0, 0, 10, {1, 0}), InvalidArgument);
}

#include <doctest.h>

#include <itolab/diffusion_probe.hpp>
#include <itolab/error.hpp>

#include "oracles.hpp"

#include <cmath>

using namespace itolab;

namespace {

// f(t, x) = x_0^n + tau * t, one-dimensional.
GeneratorInput power(int n, double tau = 0.0) {
    GeneratorInput f;
    f.value = [=](double t, std::span<const double> x) { return std::pow(x[0], n) + tau * t; };
    f.time_derivative = [=](double, std::span<const double>) { return tau; };
    f.gradient = [=](double, std::span<const double> x, std::span<double> g) { g[0] = n * std::pow(x[0], n - 1); };
    f.hessian = [=](double, std::span<const double> x, std::span<double> h) {
        h[0] = n >= 2 ? n * (n - 1) * std::pow(x[0], n - 2) : 0.0;
    };
    f.growth_C = 1.0;
    f.growth_beta = n;
    f.description = "x^" + std::to_string(n);
    return f;
}

GeneratorInput sine_cross() {
    GeneratorInput f;
    f.value = [](double t, std::span<const double> x) { return std::sin(x[0]) * x[1] + t * t; };
    f.time_derivative = [](double t, std::span<const double>) { return 2 * t; };
    f.gradient = [](double, std::span<const double> x, std::span<double> g) {
        g[0] = std::cos(x[0]) * x[1];
        g[1] = std::sin(x[0]);
    };
    f.hessian = [](double, std::span<const double> x, std::span<double> h) {
        h[0] = -std::sin(x[0]) * x[1];
        h[1] = h[2] = std::cos(x[0]);
        h[3] = 0.0;
    };
    f.description = "sin(x0) x1 + t^2";
    return f;
}

// Inverse-variance weighted slope through the origin of gap(h), then each
// gap must sit within 4 standard errors of slope * h.
bool linear_bias_consistent(const std::vector<double>& hs, const std::vector<McEstimate>& est, double target) {
    std::vector<double> gaps, w;
    for (const auto& e : est) {
        gaps.push_back(e.mean - target);
        w.push_back(1.0 / (e.std_error * e.std_error));
    }
    const double slope = slope_through_origin(hs, gaps, w);
    for (std::size_t i = 0; i < hs.size(); ++i) {
        if (std::fabs(gaps[i] - slope * hs[i]) > 4.0 * est[i].std_error) {
            return false;
        }
    }
    return true;
}

} // namespace

TEST_CASE("supplied derivatives are cross-checked") {
    CHECK_NOTHROW(power(2).validate(1));
    CHECK_NOTHROW(power(4, 1.0).validate(1));
    CHECK_NOTHROW(sine_cross().validate(2));
    auto wrong = power(2);
    wrong.hessian = [](double, std::span<const double>, std::span<double> h) { h[0] = 2.1; };
    CHECK_THROWS_AS(wrong.validate(1), InvalidArgument);
    auto missing = power(2);
    missing.gradient = nullptr;
    CHECK_THROWS_AS(missing.validate(1), InvalidArgument);
}

TEST_CASE("generator on closed-form cases") {
    const auto bm = problems::brownian(1);
    const std::vector<double> x{0.7};
    CHECK(apply_generator(power(2), bm, 0.3, x) == doctest::Approx(1.0));
    CHECK(apply_generator(power(2, 1.0), bm, 0.3, x) == doctest::Approx(2.0));
    const double beta = 0.1, gamma = 0.3;
    for (double xv : {-1.5, 0.0, 2.0, 3.3}) {
        const std::vector<double> p{xv};
        CHECK(apply_generator(power(2), problems::gbm(beta, gamma), 0.0, p) ==
              doctest::Approx(2 * beta * xv * xv + gamma * gamma * xv * xv));
    }
}

TEST_CASE("generator is linear in f") {
    Coefficients c;
    c.state_dim = 2;
    c.noise_dim = 2;
    c.drift = [](double t, std::span<const double> x, std::span<double> out) {
        out[0] = -x[0] + t;
        out[1] = 0.5 * x[1];
    };
    c.dispersion = [](double, std::span<const double> x, std::span<double> out) {
        out[0] = 1.0; out[1] = 0.2 * x[0];
        out[2] = 0.3; out[3] = 0.8;
    };
    GeneratorInput quad;
    quad.value = [](double, std::span<const double> x) { return x[0] * x[0] + 3 * x[0] * x[1]; };
    quad.time_derivative = [](double, std::span<const double>) { return 0.0; };
    quad.gradient = [](double, std::span<const double> x, std::span<double> g) {
        g[0] = 2 * x[0] + 3 * x[1];
        g[1] = 3 * x[0];
    };
    quad.hessian = [](double, std::span<const double>, std::span<double> h) {
        h[0] = 2; h[1] = 3; h[2] = 3; h[3] = 0;
    };
    RandomStream s({5, 5});
    for (int trial = 0; trial < 25; ++trial) {
        const double a = 4 * s.uniform() - 2, b = 4 * s.uniform() - 2, t = s.uniform();
        const std::vector<double> x{4 * s.uniform() - 2, 4 * s.uniform() - 2};
        const auto combo = GeneratorInput::linear_combination(a, sine_cross(), b, quad);
        const double lhs = apply_generator(combo, c, t, x);
        const double rhs = a * apply_generator(sine_cross(), c, t, x) + b * apply_generator(quad, c, t, x);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("zero coefficients give zero drift and diffusion") {
    const std::vector<double> x{1.0, -2.0};
    const auto est = estimate_drift_diffusion(problems::zero(2), 0.0, x, 1e-3, 100, 1);
    for (const auto& e : est.drift) {
        CHECK(e.mean == 0.0);
        CHECK(e.std_error == 0.0);
    }
    for (const auto& e : est.diffusion) {
        CHECK(e.mean == 0.0);
    }
    CHECK(est.tail_rate == 0.0);
}

TEST_CASE("two-dimensional Brownian motion recovers a = I, b = 0") {
    const std::vector<double> x{0.4, -1.0};
    const auto est = estimate_drift_diffusion(problems::brownian(2), 0.5, x, 1e-3, 100000, 7);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(est.drift[i].consistent_with(0.0));
        for (std::size_t j = 0; j < 2; ++j) {
            CHECK(est.a(i, j).consistent_with(i == j ? 1.0 : 0.0));
            CHECK(est.a(i, j).mean == est.a(j, i).mean);
        }
    }
    // positive semidefinite up to noise
    const double det = est.a(0, 0).mean * est.a(1, 1).mean - est.a(0, 1).mean * est.a(1, 0).mean;
    CHECK(det > 0.0);
    CHECK(est.tail_rate < 1.0);
}

TEST_CASE("GBM drift and diffusion with a linear bias term") {
    const double beta = 0.1, gamma = 0.3;
    const std::vector<double> x{2.0};
    const std::vector<double> hs{4e-3, 2e-3, 1e-3};
    std::vector<McEstimate> b, a;
    for (std::size_t l = 0; l < hs.size(); ++l) {
        const auto est = estimate_drift_diffusion(problems::gbm(beta, gamma), 0.0, x, hs[l], 40000, derive_root(3, l));
        b.push_back(est.drift[0]);
        a.push_back(est.a(0, 0));
    }
    CHECK(linear_bias_consistent(hs, b, beta * 2.0));
    CHECK(linear_bias_consistent(hs, a, gamma * gamma * 4.0));
}

TEST_CASE("generator limit for x^2, t + x^2 and x^4") {
    const auto bm = problems::brownian(1);
    const std::vector<double> hs{0.1, 0.05, 0.025};
    const std::vector<double> x{0.7};

    const auto sq = check_generator_limit(power(2), bm, 0.0, x, hs, 20000, 11);
    CHECK(sq.generator_value == doctest::Approx(1.0));
    for (const auto& level : sq.levels) {
        CHECK(level.quotient.consistent_with(1.0));
    }
    CHECK(sq.consistent());

    const auto tsq = check_generator_limit(power(2, 1.0), bm, 0.0, x, hs, 20000, 12);
    for (const auto& level : tsq.levels) {
        CHECK(level.quotient.consistent_with(2.0));
    }

    // E (x + W_h)^4 = x^4 + 6 x^2 h + 3 h^2: gap is exactly 3 h
    const std::vector<double> one{1.0};
    const auto q = check_generator_limit(power(4), bm, 0.0, one, hs, 100000, 13);
    CHECK(q.generator_value == doctest::Approx(6.0));
    CHECK(q.consistent());
    for (const auto& level : q.levels) {
        CHECK(level.quotient.consistent_with(6.0 + 3.0 * level.h));
    }
}

TEST_CASE("without noise the quotient is the directional derivative along the Euler flow") {
    const double beta = 0.4;
    const std::vector<double> x{1.5};
    const std::vector<double> hs{0.1, 0.05, 0.025};
    const auto r = check_generator_limit(power(2), problems::gbm(beta, 0.0), 0.0, x, hs, 50, 1, 64);
    for (const auto& level : r.levels) {
        const double end = 1.5 * std::pow(1.0 + beta * level.h / 64, 64);
        CHECK(level.quotient.std_error < 1e-12);
        CHECK(level.quotient.mean == doctest::Approx((end * end - 2.25) / level.h).epsilon(1e-10));
    }
    CHECK(r.generator_value == doctest::Approx(2 * beta * 2.25));

    const std::vector<double> bad{0.1, 0.2};
    CHECK_THROWS_AS(check_generator_limit(power(2), problems::brownian(1), 0.0, x, bad, 10, 1), InvalidArgument);
}

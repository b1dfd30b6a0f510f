#include <itolab/dirichlet_mc.hpp>

#include <itolab/error.hpp>
#include <itolab/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace itolab {

namespace {

constexpr int kBisectionSteps = 60;

// Uniform point of the bounding cube around the domain centre.
void sample_cube(const Domain& domain, RandomStream& stream, std::span<double> out) {
    for (std::size_t i = 0; i < domain.dim; ++i) {
        out[i] = domain.center[i] + domain.bounding_radius * (2.0 * stream.uniform() - 1.0);
    }
}

// Rejection-samples a point of D; returns false if none found.
bool sample_inside(const Domain& domain, RandomStream& stream, std::span<double> out) {
    for (int attempt = 0; attempt < 10000; ++attempt) {
        sample_cube(domain, stream, out);
        if (domain.contains(out)) {
            return true;
        }
    }
    return false;
}

} // namespace

Domain Domain::interval(double a, double b) {
    if (!(a < b)) {
        throw InvalidArgument("Domain::interval: need a < b");
    }
    Domain d;
    std::ostringstream os;
    os << "interval(" << a << "," << b << ")";
    d.name = os.str();
    d.dim = 1;
    d.center = {0.5 * (a + b)};
    d.bounding_radius = 0.5 * (b - a);
    d.contains = [a, b](std::span<const double> x) { return x[0] > a && x[0] < b; };
    d.boundary_project = [a, b](std::span<const double>, std::span<const double> outside, std::span<double> out) {
        out[0] = outside[0] >= b ? b : a;
    };
    return d;
}

Domain Domain::box(std::vector<double> lower, std::vector<double> upper) {
    if (lower.size() != upper.size() || lower.empty()) {
        throw InvalidArgument("Domain::box: bounds must have equal, nonzero length");
    }
    Domain d;
    d.name = "box";
    d.dim = lower.size();
    double r2 = 0.0;
    for (std::size_t i = 0; i < d.dim; ++i) {
        if (!(lower[i] < upper[i])) {
            throw InvalidArgument("Domain::box: need lower < upper in every coordinate");
        }
        d.center.push_back(0.5 * (lower[i] + upper[i]));
        r2 += 0.25 * (upper[i] - lower[i]) * (upper[i] - lower[i]);
    }
    d.bounding_radius = std::sqrt(r2);
    d.contains = [lower, upper](std::span<const double> x) {
        for (std::size_t i = 0; i < lower.size(); ++i) {
            if (!(x[i] > lower[i] && x[i] < upper[i])) {
                return false;
            }
        }
        return true;
    };
    d.boundary_project = [lower, upper](std::span<const double> p, std::span<const double> q,
                                        std::span<double> out) {
        double s = 1.0;
        std::size_t hit = 0;
        double bound = q[0];
        for (std::size_t i = 0; i < lower.size(); ++i) {
            double si = std::numeric_limits<double>::infinity();
            double bi = 0.0;
            if (q[i] >= upper[i] && q[i] != p[i]) {
                si = (upper[i] - p[i]) / (q[i] - p[i]);
                bi = upper[i];
            } else if (q[i] <= lower[i] && q[i] != p[i]) {
                si = (lower[i] - p[i]) / (q[i] - p[i]);
                bi = lower[i];
            }
            if (si < s || (si == s && i < hit)) {
                s = si;
                hit = i;
                bound = bi;
            }
        }
        for (std::size_t i = 0; i < lower.size(); ++i) {
            out[i] = std::clamp(p[i] + s * (q[i] - p[i]), lower[i], upper[i]);
        }
        out[hit] = bound;
    };
    return d;
}

Domain Domain::ball(std::vector<double> center, double radius) {
    if (center.empty() || !(radius > 0.0)) {
        throw InvalidArgument("Domain::ball: need a centre and a positive radius");
    }
    Domain d;
    std::ostringstream os;
    os << "ball(r=" << radius << ")";
    d.name = os.str();
    d.dim = center.size();
    d.center = center;
    d.bounding_radius = radius;
    const double r2 = radius * radius;
    d.contains = [center, r2](std::span<const double> x) {
        double s = 0.0;
        for (std::size_t i = 0; i < center.size(); ++i) {
            s += (x[i] - center[i]) * (x[i] - center[i]);
        }
        return s < r2;
    };
    d.boundary_project = [center, radius, r2](std::span<const double> p, std::span<const double> q,
                                              std::span<double> out) {
        const std::size_t n = center.size();
        double a = 0.0, b = 0.0, c = -r2;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = q[i] - p[i];
            const double w = p[i] - center[i];
            a += v * v;
            b += 2.0 * v * w;
            c += w * w;
        }
        const double s = a > 0.0 ? (-b + std::sqrt(std::max(0.0, b * b - 4.0 * a * c))) / (2.0 * a) : 0.0;
        double len = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = p[i] + s * (q[i] - p[i]) - center[i];
            len += out[i] * out[i];
        }
        len = std::sqrt(len);
        // Snap onto the sphere and nudge outward until the open-ball predicate is false.
        double scale = len > 0.0 ? radius / len : 1.0;
        for (int attempt = 0; attempt < 8; ++attempt) {
            double s2 = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double v = out[i] * scale;
                s2 += v * v;
            }
            if (s2 >= r2) {
                break;
            }
            scale *= 1.0 + 2.0 * std::numeric_limits<double>::epsilon();
        }
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = center[i] + out[i] * scale;
        }
    };
    return d;
}

void Domain::check_consistency(std::uint64_t seed, std::size_t n_samples) const {
    RandomStream stream({seed, 0});
    std::vector<double> p(dim), q(dim), b(dim), back(dim);
    for (std::size_t s = 0; s < n_samples; ++s) {
        if (!sample_inside(*this, stream, p)) {
            throw InvalidArgument("Domain: could not sample an interior point");
        }
        double len = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            q[i] = stream.normal();
            len += q[i] * q[i];
        }
        len = std::sqrt(len);
        for (std::size_t i = 0; i < dim; ++i) {
            q[i] = center[i] + 2.5 * bounding_radius * q[i] / len;
        }
        boundary_project(p, q, b);
        if (contains(b)) {
            throw InvalidArgument("Domain " + name + ": projected boundary point lies inside the domain");
        }
        const double seg = std::max(1e-300, [&] {
            double acc = 0.0;
            for (std::size_t i = 0; i < dim; ++i) {
                acc += (q[i] - p[i]) * (q[i] - p[i]);
            }
            return std::sqrt(acc);
        }());
        for (std::size_t i = 0; i < dim; ++i) {
            back[i] = b[i] - 1e-9 * bounding_radius * (q[i] - p[i]) / seg;
        }
        if (!contains(back)) {
            throw InvalidArgument("Domain " + name + ": a point just inside the projected boundary is outside");
        }
    }
}

double ellipticity_margin(const DirichletProblem& prob, std::size_t n_samples, std::uint64_t seed) {
    const Domain& domain = prob.domain;
    const std::size_t d = prob.coeffs.state_dim;
    RandomStream stream({seed, 0});
    std::vector<double> x(d);
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < n_samples; ++s) {
        if (!sample_inside(domain, stream, x)) {
            throw InvalidArgument("ellipticity_margin: could not sample an interior point");
        }
        const std::vector<double> a = prob.coeffs.diffusion_matrix(0.0, x);
        double best = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            best = std::max(best, a[i * d + i]);
        }
        margin = std::min(margin, best);
        if (prob.discount && prob.discount(x) < 0.0) {
            throw InvalidArgument("DirichletProblem: discount c(x) < 0 inside the domain");
        }
    }
    return margin;
}

double default_t_cap(const DirichletProblem& prob) {
    const double margin = ellipticity_margin(prob);
    if (!(margin > 0.0)) {
        throw InvalidArgument("default_t_cap: ellipticity probe failed (min max_i a_ii <= 0)");
    }
    const double r = prob.domain.bounding_radius;
    return 100.0 * r * r * static_cast<double>(prob.coeffs.state_dim) / margin;
}

ExitSample exit_time(const DirichletProblem& prob, std::span<const double> x, double dt, SeedSpec seed,
                     double t_cap) {
    const Coefficients& coeffs = prob.coeffs;
    const std::size_t d = coeffs.state_dim, m = coeffs.noise_dim;
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw InvalidArgument("exit_time: dt must be positive");
    }
    if (x.size() != d || prob.domain.dim != d) {
        throw InvalidArgument("exit_time: dimension mismatch between x, domain and coefficients");
    }
    if (!prob.domain.contains(x)) {
        throw InvalidArgument("exit_time: starting point is not inside the domain");
    }

    RandomStream stream(seed);
    const double sqrt_dt = std::sqrt(dt);
    std::vector<double> state(x.begin(), x.end()), next(d), b(d), sigma(d * m), dw(m), probe(d);
    double exponent = 0.0;
    double discount = 1.0;
    ExitSample out;
    for (std::size_t k = 0;; ++k) {
        const double t = static_cast<double>(k) * dt;
        if (t >= t_cap) {
            out.capped = true;
            out.tau = out.raw_tau = t;
            out.exit_point = state;
            out.steps = k;
            break;
        }
        coeffs.drift(t, state, b);
        coeffs.dispersion(t, state, sigma);
        for (std::size_t j = 0; j < m; ++j) {
            dw[j] = sqrt_dt * stream.normal();
        }
        for (std::size_t i = 0; i < d; ++i) {
            double noise = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                noise += sigma[i * m + j] * dw[j];
            }
            next[i] = state[i] + b[i] * dt + noise;
            if (!std::isfinite(next[i])) {
                throw DivergenceError(k + 1, t + dt, seed.stream_id);
            }
        }

        const bool exited = !prob.domain.contains(next);
        double fraction = 1.0;
        if (exited) {
            double lo = 0.0, hi = 1.0;
            for (int it = 0; it < kBisectionSteps; ++it) {
                const double mid = 0.5 * (lo + hi);
                for (std::size_t i = 0; i < d; ++i) {
                    probe[i] = state[i] + mid * (next[i] - state[i]);
                }
                (prob.domain.contains(probe) ? lo : hi) = mid;
            }
            fraction = hi;
        }
        const double step = fraction * dt;
        if (prob.source) {
            out.source_integral += prob.source(state) * discount * step;
        }
        if (prob.discount) {
            exponent += prob.discount(state) * step;
            discount = std::exp(-exponent);
        }
        if (exited) {
            out.tau = t + step;
            out.raw_tau = t + dt;
            out.exit_point.resize(d);
            prob.domain.boundary_project(state, next, out.exit_point);
            out.steps = k + 1;
            break;
        }
        state.swap(next);
    }
    out.discount = discount;
    return out;
}

DirichletEstimate dirichlet_solve(const DirichletProblem& prob, std::span<const double> x, double dt,
                                  std::size_t n_paths, std::uint64_t root_seed, double t_cap) {
    prob.coeffs.validate();
    if (!prob.boundary_data) {
        throw InvalidArgument("DirichletProblem: boundary data must be set");
    }
    if (n_paths < 2) {
        throw InvalidArgument("dirichlet_solve: need n_paths >= 2");
    }
    if (x.size() != prob.coeffs.state_dim || !prob.domain.contains(x)) {
        throw InvalidArgument("dirichlet_solve: starting point is not inside the domain");
    }
    const double margin = ellipticity_margin(prob);
    if (!(margin > 0.0)) {
        throw InvalidArgument("dirichlet_solve: ellipticity probe failed (min max_i a_ii <= 0)");
    }
    if (!(t_cap > 0.0)) {
        const double r = prob.domain.bounding_radius;
        t_cap = 100.0 * r * r * static_cast<double>(prob.coeffs.state_dim) / margin;
    }

    const std::vector<ExitSample> samples = parallel_map(
        n_paths, [&](std::size_t i) { return exit_time(prob, x, dt, {root_seed, i}, t_cap); });

    std::vector<double> values, taus, raw_taus;
    std::size_t capped = 0;
    for (const ExitSample& s : samples) {
        if (s.capped) {
            ++capped;
            continue;
        }
        values.push_back(prob.boundary_data(s.exit_point) * s.discount - s.source_integral);
        taus.push_back(s.tau);
        raw_taus.push_back(s.raw_tau);
    }
    const double fraction = static_cast<double>(capped) / static_cast<double>(n_paths);
    if (capped * 1000 >= n_paths && capped > 0) {
        throw ExitCapError(fraction, capped, n_paths);
    }

    DirichletEstimate est;
    est.solution.t = 0.0;
    est.solution.x.assign(x.begin(), x.end());
    est.solution.value = reduce(values, root_seed);
    est.solution.n_steps = 0;
    est.solution.n_paths = n_paths;
    est.solution.dt = dt;
    est.exit_time = reduce(taus, root_seed);
    est.raw_exit_time = reduce(raw_taus, root_seed);
    est.n_capped = capped;
    est.capped_fraction = fraction;
    return est;
}

} // namespace itolab

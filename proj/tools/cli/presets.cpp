#include "cli/presets.hpp"

#include "cli/config.hpp"

#include <algorithm>
#include <cmath>

namespace itolab::cli {

namespace {

double num(const nlohmann::json& params, const char* key) { return params.at(key).get<double>(); }

std::size_t count(const nlohmann::json& params, const char* key) {
    return static_cast<std::size_t>(params.at(key).get<double>());
}

void zero_fill(std::span<double> out) { std::fill(out.begin(), out.end(), 0.0); }

Coefficients brownian(std::size_t d, std::size_t m) {
    Coefficients c;
    c.state_dim = d;
    c.noise_dim = m;
    c.drift = [](double, std::span<const double>, std::span<double> out) { zero_fill(out); };
    c.dispersion = [d, m](double, std::span<const double>, std::span<double> out) {
        zero_fill(out);
        for (std::size_t i = 0; i < std::min(d, m); ++i) {
            out[i * m + i] = 1.0;
        }
    };
    c.lipschitz_K = 1.0;
    c.growth_K = std::sqrt(static_cast<double>(std::min(d, m)));
    c.name = "bm";
    return c;
}

Coefficients gbm(double beta, double gamma) {
    Coefficients c;
    c.drift = [beta](double, std::span<const double> x, std::span<double> out) { out[0] = beta * x[0]; };
    c.dispersion = [gamma](double, std::span<const double> x, std::span<double> out) { out[0] = gamma * x[0]; };
    c.lipschitz_K = std::fabs(beta) + std::fabs(gamma);
    c.growth_K = c.lipschitz_K;
    c.name = "gbm";
    return c;
}

Coefficients ou(double theta, double sigma) {
    Coefficients c;
    c.drift = [theta](double, std::span<const double> x, std::span<double> out) { out[0] = -theta * x[0]; };
    c.dispersion = [sigma](double, std::span<const double>, std::span<double> out) { out[0] = sigma; };
    c.lipschitz_K = std::fabs(theta);
    c.growth_K = std::max(std::fabs(theta), std::fabs(sigma));
    c.name = "ou";
    return c;
}

double square(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) {
        s += v * v;
    }
    return s;
}

ParamSpec number(std::string name, double value, std::string help, bool integer = false) {
    return {std::move(name), value, {}, integer, std::move(help)};
}

ParamSpec choice(std::string name, std::string value, std::vector<std::string> choices, std::string help) {
    return {std::move(name), std::move(value), std::move(choices), false, std::move(help)};
}

const std::vector<std::string> kBoundaryData{"exit-time", "harmonic", "one"};

std::string join(const std::vector<std::string>& names) {
    std::string out;
    for (const auto& n : names) {
        out += out.empty() ? n : ", " + n;
    }
    return out;
}

} // namespace

const std::vector<Preset>& preset_registry() {
    static const std::vector<Preset> registry{
        {"bm", "standard Brownian motion, d states driven by m noises (sigma_ii = 1)", PresetKind::Sde,
         {number("d", 1, "state dimension", true), number("m", 1, "noise dimension", true)}},
        {"gbm", "geometric Brownian motion dX = beta X dt + gamma X dW, x0 = 1", PresetKind::Sde,
         {number("beta", 0.05, "drift rate"), number("gamma", 0.2, "volatility")}},
        {"ou", "Ornstein-Uhlenbeck dX = -theta X dt + sigma dW, x0 = 1", PresetKind::Sde,
         {number("theta", 1.0, "mean reversion rate"), number("sigma", 1.0, "noise level")}},
        {"heat-1d", "heat equation: b = 0, sigma = 1, f(x) = x^2; default x = 1", PresetKind::Cauchy, {}},
        {"gbm-terminal", "GBM terminal mean: f(x) = x; default x = 1", PresetKind::Cauchy,
         {number("beta", 0.05, "drift rate"), number("gamma", 0.2, "volatility")}},
        {"const-discount", "Brownian motion, f(x) = x^2, constant discount c0; default x = 0", PresetKind::Cauchy,
         {number("c0", 1.0, "discount rate (>= 0)")}},
        {"const-source", "Brownian motion, f = 0, constant source h0; default x = 0, T = 0.5", PresetKind::Cauchy,
         {number("h0", 2.0, "source value")}, 0.5},
        {"interval-exit", "1-d Brownian motion on (a, b); default x = (a + b) / 2", PresetKind::Dirichlet,
         {number("a", -1.0, "left end"), number("b", 1.0, "right end"),
          choice("data", "exit-time", kBoundaryData,
                 "exit-time: f = 0, h = -1 (u = E tau); harmonic: f(x) = x_0; one: f = 1")}},
        {"disk-exit", "2-d Brownian motion on the disk of radius r about 0; default x = 0", PresetKind::Dirichlet,
         {number("r", 1.0, "radius"),
          choice("data", "exit-time", kBoundaryData,
                 "exit-time: f = 0, h = -1 (u = E tau); harmonic: f(x) = x_0; one: f = 1")}},
    };
    return registry;
}

const Preset& find_preset(const std::string& name) {
    const auto& registry = preset_registry();
    const auto it = std::find_if(registry.begin(), registry.end(), [&](const Preset& p) { return p.name == name; });
    if (it == registry.end()) {
        std::vector<std::string> names;
        for (const auto& p : registry) {
            names.push_back(p.name);
        }
        throw ConfigError("unknown preset '" + name + "' (valid presets: " + join(names) + ")");
    }
    return *it;
}

nlohmann::json resolve_params(const std::vector<ParamSpec>& specs,
                              const std::vector<std::pair<std::string, std::string>>& raw) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& s : specs) {
        out[s.name] = s.default_value;
    }
    for (const auto& [key, text] : raw) {
        const auto it = std::find_if(specs.begin(), specs.end(), [&](const ParamSpec& s) { return s.name == key; });
        if (it == specs.end()) {
            std::vector<std::string> names;
            for (const auto& s : specs) {
                names.push_back(s.name);
            }
            throw ConfigError("unknown parameter '" + key + "' (valid parameters: " +
                              (names.empty() ? std::string("none") : join(names)) + ")");
        }
        if (it->default_value.is_string()) {
            if (std::find(it->choices.begin(), it->choices.end(), text) == it->choices.end()) {
                throw ConfigError("parameter " + key + ": '" + text + "' is not one of " + join(it->choices));
            }
            out[key] = text;
            continue;
        }
        double value = 0.0;
        try {
            std::size_t used = 0;
            value = std::stod(text, &used);
            if (used != text.size()) {
                throw std::invalid_argument("trailing characters");
            }
        } catch (const std::logic_error&) {
            throw ConfigError("parameter " + key + ": '" + text + "' is not a number");
        }
        if (!std::isfinite(value)) {
            throw ConfigError("parameter " + key + " must be finite");
        }
        if (it->integer && (value < 1.0 || value != std::floor(value) || value > 1e9)) {
            throw ConfigError("parameter " + key + " must be a positive integer");
        }
        out[key] = value;
    }
    return out;
}

std::size_t state_dim(const Preset& preset, const nlohmann::json& params) {
    if (preset.name == "bm") {
        return count(params, "d");
    }
    return preset.name == "disk-exit" ? 2 : 1;
}

std::vector<double> default_start(const Preset& preset, const nlohmann::json& params) {
    if (preset.name == "bm") {
        return std::vector<double>(count(params, "d"), 0.0);
    }
    if (preset.name == "gbm" || preset.name == "ou" || preset.name == "heat-1d" || preset.name == "gbm-terminal") {
        return {1.0};
    }
    if (preset.name == "interval-exit") {
        return {0.5 * (num(params, "a") + num(params, "b"))};
    }
    if (preset.name == "disk-exit") {
        return {0.0, 0.0};
    }
    return {0.0};
}

Coefficients make_coefficients(const Preset& preset, const nlohmann::json& params) {
    const std::string& n = preset.name;
    if (n == "bm") {
        return brownian(count(params, "d"), count(params, "m"));
    }
    if (n == "gbm" || n == "gbm-terminal") {
        return gbm(num(params, "beta"), num(params, "gamma"));
    }
    if (n == "ou") {
        return ou(num(params, "theta"), num(params, "sigma"));
    }
    return brownian(state_dim(preset, params), state_dim(preset, params));
}

CauchyProblem make_cauchy(const Preset& preset, const nlohmann::json& params, double T) {
    if (preset.kind != PresetKind::Cauchy) {
        throw ConfigError("preset " + preset.name + " is not a Cauchy problem");
    }
    CauchyProblem p;
    p.coeffs = make_coefficients(preset, params);
    p.T = T;
    p.name = preset.name;
    const std::string& n = preset.name;
    if (n == "gbm-terminal") {
        p.payoff = [](std::span<const double> x) { return x[0]; };
        p.payoff_growth = GrowthDeclaration::polynomial(1.0, 0.5);
    } else if (n == "const-source") {
        const double h0 = num(params, "h0");
        p.payoff = [](std::span<const double>) { return 0.0; };
        p.payoff_growth = GrowthDeclaration::nonnegative();
        p.source = [h0](double, std::span<const double>) { return h0; };
        p.source_growth = GrowthDeclaration::polynomial(std::max(std::fabs(h0), 1e-300), 0.0);
    } else {
        p.payoff = [](std::span<const double> x) { return square(x); };
        p.payoff_growth = GrowthDeclaration::polynomial(1.0, 1.0);
        if (n == "const-discount") {
            const double c0 = num(params, "c0");
            if (c0 < 0.0) {
                throw ConfigError("const-discount: c0 must be >= 0");
            }
            p.discount = [c0](double, std::span<const double>) { return c0; };
        }
    }
    return p;
}

DirichletProblem make_dirichlet(const Preset& preset, const nlohmann::json& params) {
    if (preset.kind != PresetKind::Dirichlet) {
        throw ConfigError("preset " + preset.name + " is not a Dirichlet problem");
    }
    DirichletProblem p;
    p.coeffs = make_coefficients(preset, params);
    p.name = preset.name;
    if (preset.name == "interval-exit") {
        const double a = num(params, "a"), b = num(params, "b");
        if (!(a < b)) {
            throw ConfigError("interval-exit: need a < b");
        }
        p.domain = Domain::interval(a, b);
    } else {
        const double r = num(params, "r");
        if (!(r > 0.0)) {
            throw ConfigError("disk-exit: need r > 0");
        }
        p.domain = Domain::ball({0.0, 0.0}, r);
    }
    const std::string data = params.at("data").get<std::string>();
    if (data == "exit-time") {
        p.boundary_data = [](std::span<const double>) { return 0.0; };
        p.source = [](std::span<const double>) { return -1.0; };
    } else if (data == "harmonic") {
        p.boundary_data = [](std::span<const double> x) { return x[0]; };
    } else {
        p.boundary_data = [](std::span<const double>) { return 1.0; };
    }
    return p;
}

std::optional<double> closed_form(const Preset& preset, const nlohmann::json& params, double t,
                                  const std::vector<double>& x, double T) {
    const std::string& n = preset.name;
    const double tau = T - t;
    if (n == "bm") {
        return x[0];
    }
    if (n == "gbm" || n == "gbm-terminal") {
        return x[0] * std::exp(num(params, "beta") * tau);
    }
    if (n == "ou") {
        return x[0] * std::exp(-num(params, "theta") * tau);
    }
    if (n == "heat-1d") {
        return x[0] * x[0] + tau;
    }
    if (n == "const-discount") {
        return std::exp(-num(params, "c0") * tau) * (x[0] * x[0] + tau);
    }
    if (n == "const-source") {
        return -num(params, "h0") * tau;
    }
    const std::string data = params.at("data").get<std::string>();
    if (data == "one") {
        return 1.0;
    }
    if (data == "harmonic") {
        return x[0];
    }
    if (n == "interval-exit") {
        return (x[0] - num(params, "a")) * (num(params, "b") - x[0]);
    }
    if (n == "disk-exit") {
        const double r = num(params, "r");
        return 0.5 * (r * r - square(x));
    }
    return std::nullopt;
}

std::optional<ReferenceSolution> reference_solution(const Preset& preset, const nlohmann::json& params) {
    if (preset.name == "gbm") {
        const double beta = num(params, "beta"), gamma = num(params, "gamma");
        return ReferenceSolution([=](const SdeProblem& prob, const BrownianPath& fine) {
            const double w = fine.value(fine.grid().n_steps());
            return std::vector<double>{prob.x0[0] *
                                       std::exp((beta - 0.5 * gamma * gamma) * (prob.T - prob.t0) + gamma * w)};
        });
    }
    if (preset.name == "ou") {
        const double theta = num(params, "theta"), sigma = num(params, "sigma");
        // Stochastic convolution with midpoint weights on the fine grid.
        return ReferenceSolution([=](const SdeProblem& prob, const BrownianPath& fine) {
            const auto& g = fine.grid();
            double acc = 0.0;
            for (std::size_t k = 0; k < g.n_steps(); ++k) {
                acc += std::exp(-theta * (prob.T - 0.5 * (g[k] + g[k + 1]))) * fine.increment(k);
            }
            return std::vector<double>{prob.x0[0] * std::exp(-theta * (prob.T - prob.t0)) + sigma * acc};
        });
    }
    if (preset.name == "bm") {
        return ReferenceSolution([](const SdeProblem& prob, const BrownianPath& fine) {
            std::vector<double> out(prob.x0);
            const std::size_t n = fine.grid().n_steps();
            for (std::size_t i = 0; i < out.size() && i < fine.dim(); ++i) {
                out[i] += fine.value(n, i);
            }
            return out;
        });
    }
    return std::nullopt;
}

} // namespace itolab::cli

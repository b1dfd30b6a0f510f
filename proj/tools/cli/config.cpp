#include "cli/config.hpp"

#include "cli/presets.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace itolab::cli {

namespace {

std::string join(const std::vector<std::string>& names) {
    std::string out;
    for (const auto& n : names) {
        out += out.empty() ? n : ", " + n;
    }
    return out;
}

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw ConfigError(std::string(what) + " must be finite");
    }
}

std::string scalar_text(const nlohmann::json& v) {
    if (v.is_string()) {
        return v.get<std::string>();
    }
    if (v.is_number() || v.is_boolean()) {
        return v.dump();
    }
    throw ConfigError("config: parameter values must be numbers or strings");
}

void load_file(const std::string& path, RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file " + path);
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file " + path + ": " + e.what());
    }
    if (!j.is_object()) {
        throw ConfigError("config file " + path + ": top level must be an object");
    }
    static const std::vector<std::string> keys{"command", "preset", "params", "paths", "steps", "dt",
                                               "seed",    "t",      "x",      "T",     "levels", "out"};
    try {
        for (const auto& [key, value] : j.items()) {
            if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
                throw ConfigError("config file: unknown key '" + key + "' (valid: " + join(keys) + ")");
            }
            if (key == "command") {
                cfg.command = value.get<std::string>();
            } else if (key == "preset") {
                cfg.preset = value.get<std::string>();
            } else if (key == "params") {
                if (!value.is_object()) {
                    throw ConfigError("config file: params must be an object");
                }
                for (const auto& [pk, pv] : value.items()) {
                    cfg.params.emplace_back(pk, scalar_text(pv));
                }
            } else if (key == "paths") {
                cfg.n_paths = value.get<std::size_t>();
            } else if (key == "steps") {
                cfg.n_steps = value.get<std::size_t>();
            } else if (key == "dt") {
                cfg.dt = value.get<double>();
            } else if (key == "seed") {
                cfg.seed = value.get<std::uint64_t>();
            } else if (key == "t") {
                cfg.t = value.get<double>();
            } else if (key == "x") {
                cfg.x = value.is_array() ? value.get<std::vector<double>>() : std::vector<double>{value.get<double>()};
            } else if (key == "T") {
                cfg.T = value.get<double>();
            } else if (key == "levels") {
                cfg.levels = parse_levels(value.get<std::string>());
            } else if (key == "out") {
                cfg.output_path = value.get<std::string>();
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file " + path + ": " + e.what());
    }
}

} // namespace

void RunConfig::validate() const {
    const auto& names = command_names();
    if (command.empty()) {
        throw ConfigError("no command given (valid: " + join(names) + ")");
    }
    if (std::find(names.begin(), names.end(), command) == names.end()) {
        throw ConfigError("unknown command '" + command + "' (valid: " + join(names) + ")");
    }
    if (n_paths < 2) {
        throw ConfigError("--paths must be at least 2");
    }
    if (n_steps && *n_steps == 0) {
        throw ConfigError("--steps must be positive");
    }
    if (dt) {
        require_finite(*dt, "--dt");
        if (!(*dt > 0.0)) {
            throw ConfigError("--dt must be positive");
        }
    }
    if (t) {
        require_finite(*t, "--t");
    }
    if (T) {
        require_finite(*T, "--T");
    }
    if (x) {
        if (x->empty()) {
            throw ConfigError("--x must have at least one component");
        }
        for (double v : *x) {
            require_finite(v, "--x");
        }
    }
    if (levels && (levels->hi < levels->lo + 2 || levels->hi > 24)) {
        throw ConfigError("--levels needs at least 3 levels and an upper exponent <= 24");
    }
}

LevelRange parse_levels(const std::string& text) {
    const auto dots = text.find("..");
    if (dots == std::string::npos) {
        throw ConfigError("--levels expects k0..k1, got '" + text + "'");
    }
    try {
        std::size_t used_lo = 0, used_hi = 0;
        const std::string lo = text.substr(0, dots), hi = text.substr(dots + 2);
        const unsigned long a = std::stoul(lo, &used_lo);
        const unsigned long b = std::stoul(hi, &used_hi);
        if (used_lo != lo.size() || used_hi != hi.size() || lo.find('-') != std::string::npos ||
            hi.find('-') != std::string::npos) {
            throw std::invalid_argument("trailing characters");
        }
        return {static_cast<unsigned>(a), static_cast<unsigned>(b)};
    } catch (const std::logic_error&) {
        throw ConfigError("--levels expects k0..k1, got '" + text + "'");
    }
}

std::vector<double> parse_vector(const std::string& text) {
    std::string body = text;
    if (!body.empty() && body.front() == '[') {
        if (body.back() != ']') {
            throw ConfigError("--x: unbalanced brackets in '" + text + "'");
        }
        body = body.substr(1, body.size() - 2);
    }
    std::vector<double> out;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos) {
                throw std::invalid_argument("trailing characters");
            }
        } catch (const std::logic_error&) {
            throw ConfigError("--x: cannot parse '" + item + "' as a number");
        }
    }
    if (out.empty()) {
        throw ConfigError("--x: no components in '" + text + "'");
    }
    return out;
}

std::optional<RunConfig> parse_arguments(const std::vector<std::string>& args, std::ostream& out) {
    CLI::App app{"itolab: Monte Carlo stochastic calculus and PDE solvers", "itolab"};
    app.set_help_flag("-h,--help", "Print this help and exit");

    std::string command, config_path, preset, levels, x_text, out_path;
    std::vector<std::string> params;
    std::size_t paths = 0, steps = 0;
    double dt = 0, t = 0, T = 0;
    std::uint64_t seed = 0;
    bool list = false;

    app.add_option("command", command, "One of: " + join(command_names()));
    auto* o_config = app.add_option("--config", config_path, "JSON run configuration; flags override it");
    auto* o_paths = app.add_option("--paths", paths, "Number of Monte Carlo paths");
    auto* o_steps = app.add_option("--steps", steps, "Time steps per path");
    auto* o_dt = app.add_option("--dt", dt, "Time step (exit-time solver)");
    auto* o_seed = app.add_option("--seed", seed, "Root seed (64-bit)");
    auto* o_out = app.add_option("--out", out_path, "CSV output path");
    auto* o_levels = app.add_option("--levels", levels, "Dyadic exponents k0..k1 for convergence studies");
    auto* o_preset = app.add_option("--preset", preset, "Problem preset");
    app.add_option("--param", params, "Preset or command parameter key=value (repeatable)");
    auto* o_t = app.add_option("--t", t, "Start time");
    auto* o_x = app.add_option("--x", x_text, "Start point, comma separated or JSON array");
    auto* o_T = app.add_option("--T", T, "Horizon");
    app.add_flag("--list-presets", list, "Print the preset registry and exit");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return std::nullopt;
    } catch (const CLI::ParseError& e) {
        throw ConfigError(e.what());
    }
    if (list) {
        for (const auto& p : preset_registry()) {
            out << p.name << "  " << p.description << "\n";
        }
        return std::nullopt;
    }

    RunConfig cfg;
    if (o_config->count() > 0) {
        load_file(config_path, cfg);
    }
    if (!command.empty()) {
        cfg.command = command;
    }
    if (o_preset->count() > 0) {
        cfg.preset = preset;
    }
    for (const auto& kv : params) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw ConfigError("--param expects key=value, got '" + kv + "'");
        }
        cfg.params.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (o_paths->count() > 0) cfg.n_paths = paths;
    if (o_steps->count() > 0) cfg.n_steps = steps;
    if (o_dt->count() > 0) cfg.dt = dt;
    if (o_seed->count() > 0) cfg.seed = seed;
    if (o_out->count() > 0) cfg.output_path = out_path;
    if (o_levels->count() > 0) cfg.levels = parse_levels(levels);
    if (o_t->count() > 0) cfg.t = t;
    if (o_x->count() > 0) cfg.x = parse_vector(x_text);
    if (o_T->count() > 0) cfg.T = T;
    cfg.validate();
    return cfg;
}

} // namespace itolab::cli

#include "cli/commands.hpp"

#include "cli/presets.hpp"

#include <itolab/itolab.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>

namespace itolab::cli {

namespace {

using nlohmann::json;

struct Setup {
    const Preset* preset = nullptr;
    json params;
    std::vector<double> x;
    double t = 0.0;
    double T = 1.0;
};

ParamSpec number_param(std::string name, double value, std::string help, bool integer = false) {
    return {std::move(name), value, {}, integer, std::move(help)};
}

std::vector<ParamSpec> command_params(const std::string& command) {
    if (command == "ito-check") {
        return {{"integrand", "w", {"one", "w", "s"}, false, "X = 1, X = W_s or X = s"},
                number_param("p", 1, "moment order of the maximal inequality", true)};
    }
    if (command == "sde-solve") {
        return {number_param("tol", 1e-10, "Picard stopping tolerance"),
                number_param("picard_paths", 8, "paths also solved by Picard iteration", true)};
    }
    if (command == "diffusion-probe") {
        return {number_param("h", 1e-3, "short time step"),
                number_param("substeps", 64, "Euler sub-steps inside h", true)};
    }
    if (command == "solve-dirichlet") {
        return {number_param("t_cap", 0.0, "exit-time cap (0: automatic)")};
    }
    if (command == "convergence") {
        return {{"study", "qv", {"qv", "em-strong"}, false, "quadratic variation or Euler strong error"},
                number_param("k_fine", 0, "reference grid exponent for em-strong (0: automatic)", true)};
    }
    return {};
}

std::string raw_param(const RunConfig& cfg, const std::string& key, const std::string& fallback) {
    std::string value = fallback;
    for (const auto& [k, v] : cfg.params) {
        if (k == key) {
            value = v;
        }
    }
    return value;
}

std::string default_preset(const RunConfig& cfg) {
    if (cfg.command == "sde-solve" || cfg.command == "diffusion-probe") {
        return "gbm";
    }
    if (cfg.command == "solve-cauchy") {
        return "heat-1d";
    }
    if (cfg.command == "solve-dirichlet") {
        return "interval-exit";
    }
    if (cfg.command == "convergence" && raw_param(cfg, "study", "qv") == "em-strong") {
        return "gbm";
    }
    return "bm";
}

const char* kind_name(PresetKind k) {
    switch (k) {
    case PresetKind::Sde:
        return "SDE";
    case PresetKind::Cauchy:
        return "Cauchy";
    default:
        return "Dirichlet";
    }
}

Setup prepare(const RunConfig& cfg, PresetKind kind) {
    Setup s;
    s.preset = &find_preset(cfg.preset.empty() ? default_preset(cfg) : cfg.preset);
    if (s.preset->kind != kind) {
        std::string names;
        for (const auto& p : preset_registry()) {
            if (p.kind == kind) {
                names += names.empty() ? p.name : ", " + p.name;
            }
        }
        throw ConfigError(cfg.command + " needs a" + (kind == PresetKind::Sde ? "n " : " ") + kind_name(kind) +
                          " preset (valid presets: " + names + ")");
    }
    std::vector<ParamSpec> specs = s.preset->params;
    for (auto& extra : command_params(cfg.command)) {
        specs.push_back(std::move(extra));
    }
    s.params = resolve_params(specs, cfg.params);
    s.x = cfg.x ? *cfg.x : default_start(*s.preset, s.params);
    const std::size_t d = state_dim(*s.preset, s.params);
    if (s.x.size() != d) {
        throw ConfigError("--x has " + std::to_string(s.x.size()) + " components but preset " + s.preset->name +
                          " has state dimension " + std::to_string(d));
    }
    s.t = cfg.t.value_or(0.0);
    s.T = cfg.T.value_or(s.preset->default_T);
    return s;
}

CsvRow base_row(const RunConfig& cfg, const Setup& s) {
    CsvRow row;
    row.command = cfg.command;
    row.preset = s.preset->name;
    row.params = s.params;
    row.t = s.t;
    row.x = s.x;
    row.T = s.T;
    row.n_paths = cfg.n_paths;
    row.seed = cfg.seed;
    return row;
}

json estimate_json(const McEstimate& e) { return json{{"mean", e.mean}, {"stderr", e.std_error}}; }

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string summary_line(const CsvRow& row, const std::string& what) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s %s: %s = %.10g +/- %.3g (n_paths = %zu, seed = %llu)", row.command.c_str(),
                  row.preset.c_str(), what.c_str(), row.estimate, row.std_error, row.n_paths,
                  static_cast<unsigned long long>(row.seed));
    return buf;
}

SdeProblem sde_problem(const Setup& s) {
    SdeProblem prob{make_coefficients(*s.preset, s.params), s.t, s.x, s.T};
    prob.validate();
    return prob;
}

CommandResult run_simulate(const RunConfig& cfg) {
    const Setup s = prepare(cfg, PresetKind::Sde);
    const SdeProblem prob = sde_problem(s);
    const std::size_t steps = cfg.n_steps.value_or(256);
    const std::size_t d = prob.coeffs.state_dim;
    const auto finals = parallel_map(cfg.n_paths, [&](std::size_t i) {
        const SolutionPath sol = simulate(prob, steps, {cfg.seed, i});
        const auto end = sol.final_state();
        return std::vector<double>(end.begin(), end.end());
    });
    std::vector<McEstimate> components;
    std::vector<double> buf(cfg.n_paths);
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t i = 0; i < cfg.n_paths; ++i) {
            buf[i] = finals[i][j];
        }
        components.push_back(reduce(buf, cfg.seed));
    }
    CommandResult r;
    r.row = base_row(cfg, s);
    r.row.n_steps = steps;
    r.row.dt = (s.T - s.t) / static_cast<double>(steps);
    r.row.estimate = components[0].mean;
    r.row.std_error = components[0].std_error;
    json means = json::array(), errors = json::array();
    for (const auto& c : components) {
        means.push_back(c.mean);
        errors.push_back(c.std_error);
    }
    r.row.extra = {{"final_mean", means},
                   {"final_stderr", errors},
                   {"closed_form_mean", optional_json(closed_form(*s.preset, s.params, s.t, s.x, s.T))}};
    r.summary = summary_line(r.row, "E X_T[0]");
    r.warnings = spot_check(prob.coeffs, s.t, s.T).warnings(prob.coeffs);
    return r;
}

CommandResult run_ito_check(const RunConfig& cfg) {
    const Setup s = prepare(cfg, PresetKind::Sde);
    if (s.preset->name != "bm" || state_dim(*s.preset, s.params) != 1 || s.params.at("m").get<double>() != 1.0) {
        throw ConfigError("ito-check integrates against one-dimensional Brownian motion (preset bm, d = m = 1)");
    }
    const std::string integrand = s.params.at("integrand").get<std::string>();
    const AdaptedProcess X = integrand == "one" ? AdaptedProcess::constant(1.0)
                             : integrand == "w" ? AdaptedProcess::brownian()
                                                : AdaptedProcess::identity_time();
    const int p = static_cast<int>(s.params.at("p").get<double>());
    const std::size_t steps = cfg.n_steps.value_or(256);
    if (!(s.T > 0.0)) {
        throw ConfigError("ito-check: --T must be positive");
    }
    const IsometryReport iso = check_isometry(X, s.T, cfg.n_paths, {cfg.seed, 0}, steps);
    const MaximalReport max = check_maximal_inequalities(X, s.T, p, cfg.n_paths, {cfg.seed, 0}, steps);

    CommandResult r;
    r.row = base_row(cfg, s);
    r.row.t = 0.0;
    r.row.n_steps = steps;
    r.row.dt = s.T / static_cast<double>(steps);
    r.row.estimate = iso.squared_integral.mean;
    r.row.std_error = iso.squared_integral.std_error;
    r.row.extra = {{"integrand_energy", estimate_json(iso.integrand_energy)},
                   {"isometry_difference", estimate_json(iso.difference)},
                   {"mean_integral", estimate_json(iso.mean_integral)},
                   {"isometry_holds", iso.isometry_holds()},
                   {"zero_mean_holds", iso.zero_mean_holds()},
                   {"p", p},
                   {"moment_constant", max.constant},
                   {"sup_moment", estimate_json(max.sup_moment)},
                   {"rhs", max.rhs},
                   {"doob_rhs", max.doob_rhs},
                   {"tolerance_factor", max.tolerance_factor},
                   {"maximal_consistent", max.consistent},
                   {"doob_consistent", max.doob_consistent}};
    r.summary = summary_line(r.row, "E (int X dW)^2");
    return r;
}

CommandResult run_sde_solve(const RunConfig& cfg) {
    const Setup s = prepare(cfg, PresetKind::Sde);
    const SdeProblem prob = sde_problem(s);
    const std::size_t steps = cfg.n_steps.value_or(256);
    const double tol = s.params.at("tol").get<double>();
    if (!(tol > 0.0)) {
        throw ConfigError("sde-solve: tol must be positive");
    }
    const std::size_t picard_paths =
        std::min(cfg.n_paths, static_cast<std::size_t>(s.params.at("picard_paths").get<double>()));
    const TimeGrid grid = make_uniform_grid(s.t, s.T, steps);

    struct PathResult {
        double final0 = 0.0;
        double picard_distance = 0.0;
        std::size_t iterations = 0;
    };
    const auto results = parallel_map(cfg.n_paths, [&](std::size_t i) {
        const BrownianPath path = sample_path(grid, prob.coeffs.noise_dim, {cfg.seed, i});
        const SolutionPath em = euler_maruyama(prob, path);
        PathResult out;
        out.final0 = em.final_state()[0];
        if (i < picard_paths) {
            const PicardResult pic = picard_solve(prob, path, tol);
            out.picard_distance = sup_distance(pic.solution, em);
            out.iterations = pic.iterations;
        }
        return out;
    });
    std::vector<double> finals(cfg.n_paths);
    double worst = 0.0, iterations = 0.0;
    for (std::size_t i = 0; i < cfg.n_paths; ++i) {
        finals[i] = results[i].final0;
        worst = std::max(worst, results[i].picard_distance);
        iterations += static_cast<double>(results[i].iterations);
    }
    const McEstimate final = reduce(finals, cfg.seed);
    const UniquenessReport uniq = uniqueness_check(prob, {cfg.seed, 0}, 1, tol);

    CommandResult r;
    r.row = base_row(cfg, s);
    r.row.n_steps = steps;
    r.row.dt = grid.mesh();
    r.row.estimate = final.mean;
    r.row.std_error = final.std_error;
    r.row.extra = {{"picard_paths", picard_paths},
                   {"picard_max_sup_distance", worst},
                   {"picard_mean_iterations", picard_paths ? iterations / static_cast<double>(picard_paths) : 0.0},
                   {"uniqueness_passed", uniq.passed},
                   {"uniqueness_max_distance", uniq.max_distance},
                   {"closed_form_mean", optional_json(closed_form(*s.preset, s.params, s.t, s.x, s.T))}};
    r.summary = summary_line(r.row, "E X_T[0]");
    r.warnings = spot_check(prob.coeffs, s.t, s.T).warnings(prob.coeffs);
    return r;
}

CommandResult run_diffusion_probe(const RunConfig& cfg) {
    const Setup s = prepare(cfg, PresetKind::Sde);
    const Coefficients coeffs = make_coefficients(*s.preset, s.params);
    const double h = s.params.at("h").get<double>();
    const auto substeps = static_cast<std::size_t>(s.params.at("substeps").get<double>());
    if (!(h > 0.0)) {
        throw ConfigError("diffusion-probe: h must be positive");
    }
    const DriftDiffusionEstimate est = estimate_drift_diffusion(coeffs, s.t, s.x, h, cfg.n_paths, cfg.seed, substeps);
    const std::size_t d = coeffs.state_dim;
    std::vector<double> b(d);
    coeffs.eval_drift(s.t, s.x, b);
    json drift = json::array(), drift_se = json::array(), diff = json::array(), diff_se = json::array();
    for (const auto& e : est.drift) {
        drift.push_back(e.mean);
        drift_se.push_back(e.std_error);
    }
    for (const auto& e : est.diffusion) {
        diff.push_back(e.mean);
        diff_se.push_back(e.std_error);
    }

    CommandResult r;
    r.row = base_row(cfg, s);
    r.row.T = std::nullopt;
    r.row.n_steps = substeps;
    r.row.dt = h / static_cast<double>(substeps);
    r.row.estimate = est.drift[0].mean;
    r.row.std_error = est.drift[0].std_error;
    r.row.extra = {{"drift", drift},
                   {"drift_stderr", drift_se},
                   {"diffusion", diff},
                   {"diffusion_stderr", diff_se},
                   {"tail_rate", est.tail_rate},
                   {"true_drift", b},
                   {"true_diffusion", coeffs.diffusion_matrix(s.t, s.x)}};
    r.summary = summary_line(r.row, "b_hat[0]");
    return r;
}

CommandResult run_solve_cauchy(const RunConfig& cfg) {
    const Setup s = prepare(cfg, PresetKind::Cauchy);
    const CauchyProblem prob = make_cauchy(*s.preset, s.params, s.T);
    const CauchyValidation check = validate(prob);
    const std::size_t steps = cfg.n_steps.value_or(256);

    CommandResult r;
    r.row = base_row(cfg, s);
    r.row.n_steps = steps;
    r.warnings = check.warnings;
    PdeEstimate est;
    json ladder_json = nullptr;
    double band = 0.0;
    if (steps % 4 == 0) {
        const WeakBiasLadder ladder = weak_bias_ladder(prob, s.t, s.x, steps, cfg.n_paths, cfg.seed);
        est = ladder.finest();
        band = ladder.band();
        ladder_json = json::array();
        for (const auto& level : ladder.levels) {
            ladder_json.push_back({{"n_steps", level.n_steps}, {"mean", level.value.mean}, {"stderr", level.value.std_error}});
        }
        r.row.extra["weak_slope"] = ladder.slope;
    } else if (prob.discount || prob.source) {
        est = feynman_kac_solve(prob, s.t, s.x, steps, cfg.n_paths, cfg.seed);
        band = 4.0 * est.value.std_error;
    } else {
        est = kolmogorov_solve(prob, s.t, s.x, steps, cfg.n_paths, cfg.seed);
        band = 4.0 * est.value.std_error;
    }
    const auto exact = closed_form(*s.preset, s.params, s.t, s.x, s.T);
    r.row.dt = est.dt;
    r.row.estimate = est.value.mean;
    r.row.std_error = est.value.std_error;
    r.row.extra["ladder"] = ladder_json;
    r.row.extra["band"] = band;
    r.row.extra["closed_form"] = optional_json(exact);
    r.row.extra["within_band"] = exact ? json(std::fabs(est.value.mean - *exact) <= band) : json(nullptr);
    r.row.extra["n_diverged"] = est.n_diverged;
    r.row.extra["payoff_admission"] = check.payoff_admission;
    r.row.extra["source_admission"] = check.source_admission;
    r.summary = summary_line(r.row, "u(t,x)");
    return r;
}

CommandResult run_solve_dirichlet(const RunConfig& cfg) {
    const Setup s = prepare(cfg, PresetKind::Dirichlet);
    const DirichletProblem prob = make_dirichlet(*s.preset, s.params);
    const double dt = cfg.dt.value_or(1e-3);
    const DirichletEstimate est = dirichlet_solve(prob, s.x, dt, cfg.n_paths, cfg.seed, s.params.at("t_cap").get<double>());
    const auto exact = closed_form(*s.preset, s.params, 0.0, s.x, 0.0);
    const double band = 4.0 * est.solution.value.std_error + 2.0 * std::sqrt(dt);

    CommandResult r;
    r.row = base_row(cfg, s);
    r.row.t = std::nullopt;
    r.row.T = std::nullopt;
    r.row.dt = dt;
    r.row.estimate = est.solution.value.mean;
    r.row.std_error = est.solution.value.std_error;
    r.row.extra = {{"exit_time", estimate_json(est.exit_time)},
                   {"raw_exit_time", estimate_json(est.raw_exit_time)},
                   {"n_capped", est.n_capped},
                   {"capped_fraction", est.capped_fraction},
                   {"band", band},
                   {"closed_form", optional_json(exact)},
                   {"within_band", exact ? json(std::fabs(est.solution.value.mean - *exact) <= band) : json(nullptr)}};
    r.summary = summary_line(r.row, "u(x)");
    return r;
}

CommandResult run_convergence(const RunConfig& cfg) {
    const Setup s = prepare(cfg, PresetKind::Sde);
    const std::string study = s.params.at("study").get<std::string>();
    const LevelRange levels = cfg.levels.value_or(study == "qv" ? LevelRange{6, 14} : LevelRange{4, 8});

    ConvergenceReport fit;
    json level_json = json::array();
    if (study == "qv") {
        if (s.preset->name != "bm" || state_dim(*s.preset, s.params) != 1) {
            throw ConfigError("convergence study qv runs on preset bm with d = 1");
        }
        if (!(s.T > 0.0)) {
            throw ConfigError("convergence: --T must be positive");
        }
        const QvStudy qv = quadratic_variation_study(s.T, levels.lo, levels.hi, cfg.n_paths, cfg.seed);
        for (const auto& l : qv.levels) {
            level_json.push_back({{"n_steps", l.n_steps},
                                  {"mesh", l.mesh},
                                  {"rms_error", l.rms_error},
                                  {"squared_error", estimate_json(l.squared_error)}});
        }
        fit = qv.fit;
    } else {
        const SdeProblem prob = sde_problem(s);
        const auto reference = reference_solution(*s.preset, s.params);
        if (!reference) {
            throw ConfigError("preset " + s.preset->name + " has no closed-form reference for em-strong");
        }
        auto k_fine = static_cast<unsigned>(s.params.at("k_fine").get<double>());
        if (k_fine == 0) {
            k_fine = s.preset->name == "ou" ? std::min(levels.hi + 6, 24u) : levels.hi;
        }
        const StrongConvergence sc = strong_convergence(prob, *reference, levels.lo, levels.hi, k_fine, cfg.n_paths, cfg.seed);
        for (const auto& l : sc.levels) {
            level_json.push_back({{"n_steps", l.n_steps}, {"dt", l.dt}, {"error", estimate_json(l.error)}});
        }
        fit = sc.fit;
    }
    std::vector<double> lx, ly;
    for (const auto& l : fit.levels) {
        lx.push_back(std::log(l.resolution));
        ly.push_back(std::log(l.error));
    }
    const LinearFit line = least_squares(lx, ly);

    CommandResult r;
    r.row = base_row(cfg, s);
    r.row.n_steps = std::size_t{1} << levels.hi;
    r.row.dt = fit.levels.back().resolution;
    r.row.estimate = fit.fitted_order;
    r.row.std_error = line.slope_std_error;
    r.row.extra = {{"study", study},
                   {"levels", level_json},
                   {"k_range", {levels.lo, levels.hi}},
                   {"fit_residual", fit.fit_residual},
                   {"log_constant", fit.log_constant}};
    r.summary = summary_line(r.row, "fitted order");
    return r;
}

} // namespace

CommandResult execute(const RunConfig& cfg) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    CommandResult result;
    if (cfg.command == "simulate") {
        result = run_simulate(cfg);
    } else if (cfg.command == "ito-check") {
        result = run_ito_check(cfg);
    } else if (cfg.command == "sde-solve") {
        result = run_sde_solve(cfg);
    } else if (cfg.command == "diffusion-probe") {
        result = run_diffusion_probe(cfg);
    } else if (cfg.command == "solve-cauchy") {
        result = run_solve_cauchy(cfg);
    } else if (cfg.command == "solve-dirichlet") {
        result = run_solve_dirichlet(cfg);
    } else {
        result = run_convergence(cfg);
    }
    if (!std::isfinite(result.row.estimate) || !std::isfinite(result.row.std_error)) {
        throw NumericalError("estimate or standard error is not finite (overflow in the sample moments)");
    }
    const auto elapsed = std::chrono::steady_clock::now() - start;
    result.row.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
    return result;
}

} // namespace itolab::cli

#pragma once

#include <itolab/cauchy_mc.hpp>
#include <itolab/dirichlet_mc.hpp>
#include <itolab/sde.hpp>

#include <json.hpp>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace itolab::cli {

enum class PresetKind { Sde, Cauchy, Dirichlet };

// One tunable parameter: a numeric default, or a string default with the
// accepted choices.
struct ParamSpec {
    std::string name;
    nlohmann::json default_value;
    std::vector<std::string> choices;  // string parameters only
    bool integer = false;
    std::string help;
};

struct Preset {
    std::string name;
    std::string description;
    PresetKind kind = PresetKind::Sde;
    std::vector<ParamSpec> params;
    double default_T = 1.0;
};

const std::vector<Preset>& preset_registry();

// Throws ConfigError listing the registered names.
const Preset& find_preset(const std::string& name);

// Starts from the defaults of `specs`, applies the raw overrides in order
// (later ones win) and returns a JSON object keyed by name. Unknown keys,
// non-numeric values for numeric parameters and values outside `choices`
// throw ConfigError.
nlohmann::json resolve_params(const std::vector<ParamSpec>& specs,
                              const std::vector<std::pair<std::string, std::string>>& raw);

std::size_t state_dim(const Preset& preset, const nlohmann::json& params);
std::vector<double> default_start(const Preset& preset, const nlohmann::json& params);

Coefficients make_coefficients(const Preset& preset, const nlohmann::json& params);
CauchyProblem make_cauchy(const Preset& preset, const nlohmann::json& params, double T);
DirichletProblem make_dirichlet(const Preset& preset, const nlohmann::json& params);

// Closed-form value of the preset problem at (t, x), when one is known:
// E X_T for SDE presets, u(t, x) for Cauchy presets, u(x) for Dirichlet presets.
std::optional<double> closed_form(const Preset& preset, const nlohmann::json& params, double t,
                                  const std::vector<double>& x, double T);

// Exact terminal state driven by a fine path, for strong-error studies.
std::optional<ReferenceSolution> reference_solution(const Preset& preset, const nlohmann::json& params);

} // namespace itolab::cli

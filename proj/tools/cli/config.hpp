#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace itolab::cli {

// Bad configuration: unknown command, preset or parameter, unreadable file.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"simulate",     "ito-check",       "sde-solve",  "diffusion-probe",
                                                "solve-cauchy", "solve-dirichlet", "convergence"};
    return names;
}

struct LevelRange {
    unsigned lo = 0;
    unsigned hi = 0;
};

struct RunConfig {
    std::string command;
    std::string preset;                   // empty: command default
    std::vector<std::pair<std::string, std::string>> params;  // raw key=value, in order given
    std::size_t n_paths = 10000;
    std::optional<std::size_t> n_steps;
    std::optional<double> dt;
    std::uint64_t seed = 1;
    std::optional<double> t;
    std::optional<std::vector<double>> x;
    std::optional<double> T;
    std::optional<LevelRange> levels;
    std::string output_path;  // empty: itolab-<command>.csv

    // Throws ConfigError on non-positive counts, non-finite numbers or an
    // unknown command.
    void validate() const;
};

// "6..14" -> {6, 14}
LevelRange parse_levels(const std::string& text);

// "1,2.5" or "[1, 2.5]" -> {1, 2.5}
std::vector<double> parse_vector(const std::string& text);

// Merges the JSON config file (if --config is given) with the flags; flags
// win. Throws ConfigError. Returns nullopt when help or the preset list was
// printed to `out` instead.
std::optional<RunConfig> parse_arguments(const std::vector<std::string>& args, std::ostream& out);

} // namespace itolab::cli

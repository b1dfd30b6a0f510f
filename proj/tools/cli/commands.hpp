#pragma once

#include "cli/config.hpp"
#include "cli/csv.hpp"

#include <string>
#include <vector>

namespace itolab::cli {

struct CommandResult {
    CsvRow row;
    std::string summary;                // one line, no trailing newline
    std::vector<std::string> warnings;  // coefficient spot-check findings and the like
};

// Runs the configured command. Throws ConfigError for bad presets or
// parameters; library exceptions (InvalidArgument, NumericalError) pass
// through.
CommandResult execute(const RunConfig& cfg);

} // namespace itolab::cli

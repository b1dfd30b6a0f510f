#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace itolab::cli {

// Parses `args` (argv without the program name), runs the command, writes the
// CSV and prints a one-line summary to `out`. Returns the exit status:
// 0 success, 1 configuration error, 2 numerical failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace itolab::cli

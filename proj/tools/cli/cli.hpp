#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace crisisgt::cli {

/// Runs the command line (args[0] is the program name). Data goes to out,
/// usage and machine-readable errors to err. Returns the exit code: 0 on
/// success, 1 on a failed command, 2 on a usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace crisisgt::cli

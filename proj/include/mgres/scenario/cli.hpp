#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mgres::scenario {

// Exit codes of every subcommand.
enum ExitCode : int { kOk = 0, kInputError = 1, kInfeasible = 2, kDownstreamInfeasible = 3 };

// Runs the command line `args` (without the program name). Diagnostics go to
// `err`, one-line results to `out`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mgres::scenario

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace aspectlab {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitAnalysis = 1, kExitInput = 2 };

/// Entry point of the `aspectlab` tool. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace aspectlab

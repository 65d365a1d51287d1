#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace noether::cli {

// Exit codes shared by every subcommand.
enum ExitCode : int {
  kOk = 0,
  kAssertionFailed = 1,
  kInputError = 2,
  kPostulateFailed = 3,
};

// Runs the command line `args` (without the program name). Reports go to
// `out`, diagnostics to `err`. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace noether::cli

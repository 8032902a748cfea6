#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace l2disc::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kSuccess = 0,
  kDomainError = 1,
  kParseError = 2,
  kConsistencyError = 3,
};

struct CommandResult {
  int exit_code = kSuccess;
  std::string payload;  ///< text destined for stdout
};

/// Runs one subcommand. `args` excludes the program name. Diagnostics and
/// usage text go to `err`; nothing is written to stdout here.
CommandResult run(const std::vector<std::string>& args, std::ostream& err);

}  // namespace l2disc::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tneedlet::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int { kSuccess = 0, kRuntimeError = 1, kUsageError = 2 };

/// Runs one subcommand (frame-info | estimate | bench | eval-grid). args
/// excludes the program name. Nothing is written to disk unless every flag
/// validates and the computation succeeds.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tneedlet::cli

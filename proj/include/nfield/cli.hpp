#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nfield {

/// Exit statuses of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitNumerical = 1, kExitConfig = 2 };

/// Runs one subcommand; `args` excludes the program name. Structured results
/// go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace nfield

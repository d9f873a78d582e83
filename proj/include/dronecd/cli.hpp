#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dronecd {

/// Exit statuses of run_cli.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2 };

/// Subcommands: solve, oracle, convert, selfcheck. argv[0] is the program
/// name. Usage problems print help to `err` and return kExitUsage; bad
/// input data returns kExitData with a diagnostic on `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dronecd

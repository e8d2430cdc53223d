#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mcgp/error.hpp"

namespace mcgp {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitData = 2,
    kExitNumeric = 3,
};

/// Exit code for a library error.
int exit_code_for(ErrorCode code);

/// Runs the tool with argv[1..] in `args`. Output files are written as the
/// flags request; summaries go to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mcgp

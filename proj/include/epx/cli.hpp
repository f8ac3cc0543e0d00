#pragma once

#include <ostream>

namespace epx {

/// Process exit codes of the command-line front end.
enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 1,
    kExitNoEP = 2,
    kExitPropagation = 3,
    kExitPrecondition = 4,
    kExitSweepFailed = 5,
};

/// Parses arguments and runs one subcommand. Data goes to `out` (or to the
/// --output file), diagnostics and progress to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace epx

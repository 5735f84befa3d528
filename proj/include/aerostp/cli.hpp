#pragma once

#include <iosfwd>

namespace aerostp {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,      // I/O and anything not covered below
  kExitConfig = 2,       // bad flags or config
  kExitNumerical = 3,    // quadrature did not converge / inconsistent result
  kExitUnsupported = 4,  // case outside what the engine supports
};

/// Entry point of `aerostp`; subcommands analyze, simulate, sweep, bound.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace aerostp

#pragma once

#include <iosfwd>

namespace cryophase {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,    ///< I/O or unexpected internal failure
  kExitValidation = 2,  ///< bad arguments or config
  kExitSolver = 3,      ///< NonConvergence / LinearSolveFailure
  kExitAssertion = 4,   ///< a study check failed (order, monotonicity, rate, determinism)
};

/// Entry point of the `cryophase` tool. Subcommands: simulate, mms, sweep-eps,
/// convergence. Reports go to `out`, diagnostics to `err`.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace cryophase

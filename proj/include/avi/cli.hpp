#pragma once

#include <iosfwd>

namespace avi {

/// Exit codes of the simulator front end.
enum ExitCode : int
{
  kExitOk = 0,
  kExitUsage = 1,      ///< bad arguments, unreadable or invalid scene
  kExitSimulation = 2, ///< the run itself failed
};

/// Entry point of `avi_sim`; diagnostics go to `err`, CSV to `out` unless --out is given.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace avi

#pragma once

#include <iosfwd>

namespace iwoa {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 2,
    kExitData = 3,
    kExitNumerical = 4,
};

/// Entry point of the `iwoa` tool: bench, gen-data, tune, eval, predict.
/// Reports go to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace iwoa

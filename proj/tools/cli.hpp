#pragma once

#include <iosfwd>

namespace treetrack {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2 };

/// Entry point of the `treetrack` command. Writes human-readable output to
/// `out` and diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace treetrack

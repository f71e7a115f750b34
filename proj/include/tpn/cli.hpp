#pragma once

#include <string>
#include <vector>

namespace tpn {

/// Entry point for the command-line tool. `args` excludes the program name
/// and is in natural order. Returns a process exit code; 0 means every
/// requested output was written.
int cli_main(std::vector<std::string> args);

/// Held-out row indices (sorted): a pure function of (seed, n, fraction),
/// independent of everything else a run does with its seed.
std::vector<int> holdout_rows(std::uint64_t seed, int n, double fraction);

}  // namespace tpn

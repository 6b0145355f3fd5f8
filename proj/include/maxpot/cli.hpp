#pragma once

#include <string>
#include <vector>

namespace maxpot {

/// Command-line entry point. Subcommands: gen, apply, verify, probe, study.
/// Exit codes: 0 success (all checks pass), 1 verification failure,
/// 2 usage/config error, 3 numerical failure (NaN in an output field).
int dispatch(const std::vector<std::string>& args);

}  // namespace maxpot

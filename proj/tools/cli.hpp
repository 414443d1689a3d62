#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace circense::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitStatisticalFailure = 2;

/// Runs the `circense` command line. `args` excludes the program name.
/// Returns the process exit code; never calls std::exit.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace circense::cli

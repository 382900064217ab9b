#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace foliate::cli {

/// Exit codes of `run`.
inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand. `args` excludes the program name. Files go to --out,
/// else $FOLIATE_OUT_DIR, else the working directory.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace foliate::cli

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tdeform::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerifyFailed = 1,
  kExitUsage = 2,
  kExitNumerical = 3,
};

/// Environment variable holding the default sweep worker count.
inline constexpr const char* kWorkersEnv = "TDEFORM_WORKERS";

/// Runs the tdeform command line. `args` excludes the program name.
/// Reports go to `out`, diagnostics to `err`; data files are written where
/// --out / --plot point.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tdeform::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vortex::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,        // bad flags, config or spectrum
  kCheckFailed = 3,  // a verification exceeded its tolerance
  kNumerical = 4,    // a numerical procedure failed
};

/// Runs one command. `args` excludes the program name. Results go to `out`
/// (or the --output file), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vortex::cli

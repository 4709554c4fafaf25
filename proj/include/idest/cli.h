#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace idest::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

/// Runs the command line `args` (without the program name) in process.
/// Everything the binary would print goes to `out` / `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace idest::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hypercurv::cli {

enum ExitCode : int { kSuccess = 0, kFailure = 1, kUsage = 2 };

// Runs one command line (args excludes the program name). Reports go to
// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hypercurv::cli

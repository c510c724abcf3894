#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace xorgame::cli {

enum ExitCode : int { kOk = 0, kValidation = 2, kNotConverged = 3, kBoundViolation = 4 };

/// Runs one command. `args` excludes the program name. Diagnostics go to
/// `err`; results go to the --output file or standard output.
int run(const std::vector<std::string>& args, std::ostream& err);

}  // namespace xorgame::cli

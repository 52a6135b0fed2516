#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pgmrf::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kDataValidation = 3,
  kNumericalFailure = 4,
};

/// Runs one command line (args[0] is the program name). Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pgmrf::cli

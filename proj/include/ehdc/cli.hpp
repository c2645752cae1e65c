#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ehdc::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kInfeasible = 2,
  kNotConverged = 3,
};

/// Runs `ehdc <solve|region|verify> ...`. `args` excludes the program name.
/// Results go to --out files when given, otherwise to `out`; diagnostics go
/// to `err`.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace ehdc::cli

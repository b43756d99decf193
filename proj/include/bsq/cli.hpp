#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace bsq::cli {

enum ExitCode : int {
  kOk = 0,
  kDisagreement = 1,
  kConvergence = 2,
  kNonResonance = 3,
  kConfig = 4,
};

/// Runs the command line (without the program name). Output goes to the
/// --out file if given, otherwise to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bsq::cli

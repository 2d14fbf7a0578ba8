#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qbm::cli {

// Exit codes of the command-line front end.
enum ExitCode : int {
    ExitOk = 0,
    ExitConfig = 1,          // parse / validation failure, divergent observable
    ExitNonConvergence = 2,  // at least one grid point failed to converge
    ExitValidationFailed = 3,
    ExitSlopeMismatch = 4,
    ExitSelfcheckFailed = 5,
};

// `args` excludes the program name. CSV and reports go to `out` unless the
// configuration names an output file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace qbm::cli

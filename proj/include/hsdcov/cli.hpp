#pragma once

// Command-line front end. Exit codes: 0 success, 1 runtime failure,
// 2 malformed flags, config or CSV, 3 inputs the statistics cannot accept
// (dimension mismatch, n < 4, non-PSD covariance, |a| p q >= 1).

#include <ostream>
#include <string>
#include <vector>

namespace hsdcov {

/// Runs one invocation. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hsdcov

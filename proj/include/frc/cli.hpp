#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace frc::cli {

enum ExitCode : int { kOk = 0, kDomainError = 1, kUsageError = 2 };

/// Runs one `frcctl` invocation. Data goes to `out` (or the --out file),
/// diagnostics and human summaries to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace frc::cli

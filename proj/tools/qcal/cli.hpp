#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qcal::cli {

/// Exit statuses of run_cli.
inline constexpr int kOk = 0;
inline constexpr int kInternalError = 1;
inline constexpr int kConfigError = 2;
inline constexpr int kNumericalError = 3;

/// Runs one qcal command line (args excludes the program name). The one-line
/// summary goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qcal::cli

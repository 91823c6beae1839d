#pragma once

#include <ostream>

namespace sockkt {

inline constexpr const char* kVersion = "0.1.0";

/// Exit codes of the command-line tool.
enum ExitCode : int {
  exit_ok = 0,
  exit_refuted = 1,
  exit_input = 2,
  exit_numeric = 3,
};

/// Entry point of `sockkt check|cq|convexity|deriv`. The JSON report goes to
/// `out`; diagnostics and the optional summary go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sockkt

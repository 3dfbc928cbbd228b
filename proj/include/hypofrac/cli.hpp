#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hypofrac::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kRuntimeError = 1;
inline constexpr int kValidationError = 2;
inline constexpr int kChecksumMismatch = 3;

/// Runs one subcommand. `args` excludes the program name. Diagnostics are
/// written to `err` as one JSON object per line.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, const char* const* argv);

}  // namespace hypofrac::cli

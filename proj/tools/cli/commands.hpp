#pragma once

#include <iosfwd>

namespace eesched::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kRuntimeError = 1;
inline constexpr int kUsageError = 2;
inline constexpr int kCheckFailed = 3;

/// Entry point shared by the executable and the tests. Results go to `out`
/// unless --out names a file; diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace eesched::cli

#pragma once

#include <iosfwd>

namespace curvad::cli {

// Exit codes: 0 success, 1 computation error, 2 usage or input error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitComputation = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the curvad tool; argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace curvad::cli

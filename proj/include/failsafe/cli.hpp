#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace failsafe::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kHypothesisFail = 1;
inline constexpr int kValidation = 2;
inline constexpr int kInconsistency = 3;
inline constexpr int kNumeric = 4;

inline constexpr unsigned long long kDefaultSeed = 20240601ULL;

// Runs the command line (without the program name), writing results to `out`
// and diagnostics to `err`. Returns the process exit code.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

} // namespace failsafe::cli

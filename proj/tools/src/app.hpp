#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace espp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Bad arguments detected after parsing (out-of-range values, inconsistent options).
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Runs the command line `args` (without the program name). Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace espp::cli

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace remlab::cli {

/// Exit codes: 0 success, 1 computation or validation failure, 2 usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `remlab` tool; args exclude the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace remlab::cli

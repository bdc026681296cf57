#pragma once

// Command-line front end. Exit codes: 0 success, 1 usage error, 2 input or
// validation error, 3 domain-negative result (unsatisfied specification,
// incomplete HLT expansion).

#include <iosfwd>
#include <string>
#include <vector>

namespace nl2spatial {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNegative = 3;

// "nl2spatial <version> (dataset schema v<N>)".
std::string version_string();

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nl2spatial

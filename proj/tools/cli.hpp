#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace siclab::cli {

// Exit codes. Nothing else is ever returned.
inline constexpr int kExitSecure = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitUnsecure = 3;

// Runs the command line `args` (without the program name). Data goes to
// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace siclab::cli

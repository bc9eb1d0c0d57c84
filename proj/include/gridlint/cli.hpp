#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gridlint {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInput = 2;

/// Runs the command line `args` (args[0] is the program name). Reports go to `out`
/// unless redirected with --out; summaries and errors go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gridlint

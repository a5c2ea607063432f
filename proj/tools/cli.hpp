#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace flipbound::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitBudget = 3;
inline constexpr int kExitNumerical = 4;

/// Runs one `flipbound` invocation. `args` excludes the program name.
/// Progress and errors go to `log`; results are written under --out.
int run(const std::vector<std::string>& args, std::ostream& log);

}  // namespace flipbound::cli

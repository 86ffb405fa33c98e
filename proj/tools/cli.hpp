#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace modcomp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitNumeric = 2;

/// Runs one command line (args excludes the program name). Results go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace modcomp::cli

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rpys {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Entry point of the rpyslab tool. args excludes the program name. Data goes
// to `out`, diagnostics and usage text to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rpys

#pragma once

// Command-line front end. `run_cli` is the whole program minus process setup,
// so tests can drive it in-process.

#include <ostream>
#include <string>
#include <vector>

namespace linconn {

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitDomain = 3;

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "1,2;3" into blocks of reals separated by ';'.
std::vector<std::vector<double>> parse_blocks(const std::string& text);

}  // namespace linconn

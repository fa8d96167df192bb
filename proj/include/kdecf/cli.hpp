#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kdecf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInfeasible = 3;

/// Runs one subcommand (estimate | risk | bounds | select | plan). `args`
/// excludes the program name. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

} // namespace kdecf::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sepcd::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitDegenerate = 2;

// Runs the tool on argv[1..]. Machine-readable summaries go to `out`,
// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sepcd::cli

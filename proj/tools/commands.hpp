#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace humor::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kDataError = 2;

// Parses `args` (without the program name) and runs one subcommand. Answers
// for eval-blind are read from `in`; progress and results go to `out`,
// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace humor::cli

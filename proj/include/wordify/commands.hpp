#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace wordify {

// Exit codes of the wordify command line.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;      // validation or simulation failure
inline constexpr int kExitEnvironment = 2;  // I/O, storage, or usage failure

// Runs the wordify command line; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wordify

#pragma once

#include <string>
#include <vector>

namespace bregfix {

// Entry point for the command-line tool; `args` excludes the program name.
// Returns the process exit code: 0 success, 1 assertion mismatch, 2 config
// or parse error, 3 domain violation, 4 numeric failure.
int run_cli(const std::vector<std::string>& args);

}  // namespace bregfix

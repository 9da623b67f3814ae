#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace volput::cli {

// Runs one command (args exclude the program name) and returns the process
// exit code: 0 success, 1 verification breach, 2 bad usage or parameters,
// 3 solver failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace volput::cli

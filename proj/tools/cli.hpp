#pragma once

// Command-line front end. Exit codes: 0 success, 2 invalid input,
// 3 resource or convergence failure, 1 anything else (I/O).

#include <ostream>
#include <string>
#include <vector>

namespace qdist::cli {

/// args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qdist::cli

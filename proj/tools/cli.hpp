#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fansmb::cli {

// Runs the command line `args` (args[0] is the program name). Returns the
// process exit code: 0 success, 1 usage error, 2 numerical failure, 3 I/O.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fansmb::cli

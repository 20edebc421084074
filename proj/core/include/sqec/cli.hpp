#pragma once

#include <string>
#include <vector>

namespace sqec {

// Command-line front end: simulate, train, decode, bench-ler, bench-time,
// intersect, export. Returns the process exit code: 0 success, 2 invalid
// configuration, 3 I/O failure, 4 training divergence.
int run_command(const std::vector<std::string>& args);

}  // namespace sqec

#pragma once

#include <string>
#include <vector>

namespace moskit {

// Full command-line surface. `args` excludes the program name. Returns the
// process exit code: 0 success, 1 bad input or usage, 2 I/O or adapter
// failure.
int run_cli(const std::vector<std::string>& args);

} // namespace moskit

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mmi::cli {

/// Runs the `mmi` command line with `args` (excluding the program name).
/// Returns the process exit code; 0 iff every output was written.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mmi::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ftir::cli {

/// Runs the `ftir` command line. `args` excludes the program name.
/// Returns 0 on success, 1 on a domain error, 2 on a usage error; errors
/// are reported on `err` as one JSON object per line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ftir::cli

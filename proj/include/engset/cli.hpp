#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace engset {

/// Runs the `engset` command line. `args` excludes the program name.
/// Returns the process exit code: 0 success, 2 usage or domain error,
/// 1 internal error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace engset

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vetk::cli {

/// Entry point behind the `vetk` executable; `args` excludes the program
/// name. Returns 0 on success, 1 on a numeric failure, 2 on a usage or
/// config error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "a:b:n" (n evenly spaced points from a to b) or a comma-separated list.
std::vector<double> parse_grid(const std::string& text);

}  // namespace vetk::cli

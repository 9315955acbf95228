#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wildfire::cli {

/// Entry point for the `wildfire` tool; returns the process exit code
/// (0 success, 1 load or check failure, 2 no safe route).
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wildfire::cli

#pragma once

#include <string>
#include <vector>

namespace subwalk {

/// Entry point shared by the subwalk binary and the test suites.
/// args = argv[1..]; returns the process exit code:
///   0 success / all checks pass, 1 verification failure or runtime error,
///   2 configuration error.
int run_cli(const std::vector<std::string>& args);

} // namespace subwalk

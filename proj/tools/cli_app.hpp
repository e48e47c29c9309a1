#pragma once

#include <string>
#include <vector>

namespace spde::cli {

/// Runs one CLI invocation. Exit status: 0 success, 2 validation/usage error,
/// 1 runtime error.
int run(const std::vector<std::string>& args);

}  // namespace spde::cli

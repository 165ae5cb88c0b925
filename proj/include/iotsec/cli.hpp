#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace iotsec::cli {

inline constexpr std::uint64_t kDefaultSeed = 42;

// Runs one CLI invocation (argv without the program name). Exit codes:
// 0 success, 1 domain error, 2 usage error or missing artifact.
int run(const std::vector<std::string>& args);

}  // namespace iotsec::cli

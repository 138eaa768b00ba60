#pragma once

#include <string>
#include <vector>

namespace combsum::cli {

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitGuard = 2;
inline constexpr int kExitUsage = 64;

/// Entry point of the `combsum` tool. args[0] is the program name.
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

/// 64-bit FNV-1a, used for the config hash in CSV metadata.
unsigned long long fnv1a(const std::string& text) noexcept;

}  // namespace combsum::cli

#pragma once

#include <string>
#include <vector>

namespace rtlrc::cli {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFatal = 1;
inline constexpr int kPartial = 2;

// Entry point of the rtlrc tool; args excludes the program name.
int run(const std::vector<std::string>& args);

}  // namespace rtlrc::cli

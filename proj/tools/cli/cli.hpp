#pragma once

#include <iosfwd>

namespace rvwalk::cli {

// Exit codes
inline constexpr int kOk = 0;
inline constexpr int kVerifyFailed = 1;
inline constexpr int kInvalidInput = 2;
inline constexpr int kResourceLimit = 3;

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace rvwalk::cli

#pragma once

namespace ipfaudit {

// Exit codes: 0 success, 1 internal error, 2 input or format error,
// 3 precondition violation.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitPrecondition = 3;

int run_cli(int argc, const char* const* argv);

}  // namespace ipfaudit

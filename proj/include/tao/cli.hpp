#pragma once

#include <ostream>

namespace tao::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

/// Entry point shared by the `tao` binary and the tests.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tao::cli

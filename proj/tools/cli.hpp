#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace determlr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFailure = 2;

/// Entry point behind the `determlr` binary. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace determlr::cli

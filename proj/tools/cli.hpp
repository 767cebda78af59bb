#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace breath::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitAlert = 2;
inline constexpr int kExitUsage = 64;

// Entry point shared by the binary and the tests. `args` excludes argv[0].
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace breath::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mfeval::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

// Runs one command line (args[0] is the program name). Results go to `out`;
// errors go to `err` as a JSON object {code, message, violations}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mfeval::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tele::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitVerifyFailed = 3;

// Seed used by `verify` when --seed is absent, so the default run is repeatable.
inline constexpr unsigned long long kVerifySeed = 20010417;

// args excludes the program name. Documents go to `out` (or --out), notes and
// errors to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tele::cli

#pragma once

// Command-line front end. Kept in the library so tests can drive it in-process.
//
//   nahm verify <id|all|families|FAMILY>... [--k K] [--i I] [--order N]
//   nahm crosscheck <id|all>...
//   nahm expand <id> --side lhs|rhs [--order N]
//   nahm eval "<product>" [--order N]
//   nahm bailey verify <chain> [--n N]
//   nahm bailey chain <chain> [--equals <chain>] [--against <id>] [--show] [--n N]
//   nahm bailey lemma23 [--k K]
//   nahm list [--tag T]
//   nahm families
//
// Exit codes: 0 everything passed, 1 a check failed, 2 usage or lookup error.

#include <iosfwd>
#include <string>
#include <vector>

namespace nahm {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

/// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nahm

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qkdsec::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitPrecondition = 3;
inline constexpr int kExitAudit = 4;

// Runs one CLI invocation. `args` excludes the program name. All output goes
// to the supplied streams; identical args (plus QKDSEC_SEED when no --seed is
// given) produce byte-identical output.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qkdsec::cli

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sefr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command line. args[0] is the program name. Normal output goes
/// to `out` (unless --out names a file), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace sefr::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace apure::cli {

inline constexpr int kSchemaVersion = 1;

/// Runs the command line `args` (without the program name).
/// Returns 0 on success, 1 on input or numerical errors, 2 on bad flags.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "1e2.5" style values: mantissa times ten to a possibly fractional power.
double parse_scientific(const std::string& text);

}  // namespace apure::cli

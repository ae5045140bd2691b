#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bandflow::cli {

/// Runs the command line `args` (args[0] is the program name) and returns the
/// process exit status. Normal output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Rewrites `key=value` arguments into `--key=value`, with '_' in the key
/// turned into '-' (so `two_j=3` becomes `--two-j=3`).
std::vector<std::string> expand_key_values(const std::vector<std::string>& args);

} // namespace bandflow::cli

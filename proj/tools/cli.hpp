#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace credal::cli {

/// Runs one command line (without the program name). Returns 0 on success,
/// 2 on usage errors and 1 on runtime errors. The one-line JSON summary goes
/// to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace credal::cli

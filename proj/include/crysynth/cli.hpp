#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace crysynth {

/// Runs one command line (without the program name). Returns the exit code:
/// 0 on success, 2 when no synthesis run succeeded, 1 on usage or I/O errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace crysynth

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kdv {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitSolver = 2, kExitIo = 3 };

/// Entry point for the kdvlab command line; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kdv

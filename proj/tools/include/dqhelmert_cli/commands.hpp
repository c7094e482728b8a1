#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dqhelmert::cli {

enum ExitCode : int { kOk = 0, kSolverFailure = 1, kInputError = 2 };

// Entry point of the `dqhelmert` executable; args excludes the program name.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dqhelmert::cli

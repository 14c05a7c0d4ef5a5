#pragma once

#include <string>
#include <vector>

namespace micol::cli {

enum ExitCode : int {
  kOk = 0,
  kValidation = 1,
  kIo = 2,
  kInternal = 3,
};

/// Runs the `micol` command line. `args` excludes the program name.
int run(const std::vector<std::string>& args);

}  // namespace micol::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace docspot::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitData = 3,
  kExitInternal = 4,
};

// Runs one `docspot` invocation. args[0] is the program name. Nothing is
// written to the process streams except through `out` and `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace docspot::cli

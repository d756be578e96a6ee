#pragma once

#include <iosfwd>

namespace neb::cli {

enum ExitCode : int {
  kOk = 0,
  kUsageError = 2,
  kSceneError = 3,
  kCapacityError = 4,
  kIoError = 5,
};

/// Command-line entry point; output goes to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace neb::cli

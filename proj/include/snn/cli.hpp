#pragma once

#include <iosfwd>

namespace snn {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitIo = 3,
  kExitNumeric = 4,
  kExitBlankDrawing = 5,
};

// Entry point of the `snn` tool: train | eval | infer | serve | config | info.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace snn

#pragma once

#include <iosfwd>

namespace multipun::cli {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitUsage = 2;

// Runs the `multipun` command line. Normal output goes to `out`, diagnostics
// to `err`. Returns kExitOk, kExitValidation or kExitUsage.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace multipun::cli

#pragma once

#include <iosfwd>

namespace medrec::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericalFailure = 3 };

// Entry point of the medrec tool; argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace medrec::cli

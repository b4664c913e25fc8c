#pragma once

#include <iosfwd>

namespace clawkit::cli {

/// Runs the command line.  Exit codes: 0 success, 1 usage or configuration
/// error, 2 mathematical failure (regression mismatch, drift over tolerance,
/// divergence).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace clawkit::cli

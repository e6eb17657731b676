#pragma once

#include <iosfwd>

namespace shapefit::cli {

/// Stable exit codes.
enum ExitCode : int {
    kSuccess = 0,
    kUsage = 1,
    kValidation = 2,
    kNumerical = 3,
};

/// Runs the `shapefit` command line; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace shapefit::cli

#pragma once

#include <iosfwd>

namespace faraday {

enum ExitCode : int {
    kExitSuccess = 0,
    kExitConfigError = 2,
    kExitNumericalFailure = 3,
    kExitIoFailure = 4,
};

/// Entry point of the `faraday` tool; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace faraday

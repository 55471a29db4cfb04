#pragma once

// Command-line frontend. run() is the whole program; tools/main.cpp only forwards argv.

#include <ostream>
#include <string>
#include <vector>

namespace tcurv::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
    kOk = 0,
    kVerificationFailure = 1,
    kInputError = 2,
    kNumericError = 3,
};

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace tcurv::cli

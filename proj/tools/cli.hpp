#pragma once

#include <ostream>

namespace definetti::cli {

/// Exit codes: 0 pass, 1 verification failure, 2 input error.
enum ExitCode { kPass = 0, kVerificationFailure = 1, kInputError = 2 };

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace definetti::cli

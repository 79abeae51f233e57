#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "kldproj/checks.hpp"

namespace kldproj::cli {

/// Exit codes.
enum Exit : int {
  kOk = 0,
  kCheckFailed = 1,
  kValidation = 2,
  kNumerical = 3,
  kIo = 4,
};

/// Runs one command line (args[0] is the program name). Errors are reported
/// on `err` as a single JSON object and mapped to an exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Runs a fixed gen/fit/eval script twice inside `workdir` with identical
/// flags and compares every output file byte for byte.
checks::CriterionResult determinism_check(const std::filesystem::path& workdir);

}  // namespace kldproj::cli

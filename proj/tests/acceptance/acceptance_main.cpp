// Acceptance criteria 1-11: one line per criterion, non-zero exit on failure.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <system_error>

#include "kldproj/checks.hpp"
#include "kldproj_cli/app.hpp"

int main(int argc, char** argv) {
  kldproj::checks::CheckOptions opts;
  if (argc > 1) opts.seed = std::strtoull(argv[1], nullptr, 10);

  auto results = kldproj::checks::run_property_checks(opts);
  const auto workdir = std::filesystem::temp_directory_path() /
                       ("kldproj-acceptance-" + std::to_string(opts.seed));
  results.push_back(kldproj::cli::determinism_check(workdir));
  std::error_code ec;
  std::filesystem::remove_all(workdir, ec);

  int passed = 0;
  for (const auto& r : results) {
    std::cout << kldproj::checks::format_result(r) << std::endl;
    passed += r.passed;
  }
  std::cout << passed << "/" << results.size() << " criteria passed" << std::endl;
  return passed == static_cast<int>(results.size()) ? 0 : 1;
}

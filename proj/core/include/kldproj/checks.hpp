#pragma once

// Property checks that exercise the exact identities behind the projection
// constructions on seeded random instances. Shared by the acceptance test
// binary and the `kldproj check` subcommand.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kldproj/eval.hpp"

namespace kldproj::checks {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct CheckOptions {
  std::uint64_t seed = 20240617;
};

/// Sweep tables emitted by the other checks; consumed by the
/// monotonicity/DPI criterion.
struct SweepLog {
  std::vector<std::pair<std::string, SweepTable>> tables;
  std::vector<Index> dims;
  void add(std::string label, SweepTable table, Index d);
};

CriterionResult single_direction_exactness(const CheckOptions& opts, SweepLog& log);
CriterionResult component_additivity(const CheckOptions& opts, SweepLog& log);
CriterionResult equal_mean_equivalence(const CheckOptions& opts, SweepLog& log);
CriterionResult order_invariance(const CheckOptions& opts, SweepLog& log);
CriterionResult multiclass_preservation(const CheckOptions& opts, SweepLog& log);
CriterionResult dpi_monotonicity(const SweepLog& log);
CriterionResult gradient_correctness(const CheckOptions& opts);
CriterionResult channel_reproduction(const CheckOptions& opts, SweepLog& log);
CriterionResult classification_reproduction(const CheckOptions& opts, SweepLog& log);
CriterionResult chernoff_consistency(const CheckOptions& opts);

/// Criteria 1-10 in order (criterion 6 runs after the sweeps it audits).
std::vector<CriterionResult> run_property_checks(const CheckOptions& opts = {});

/// "[PASS] 3 name (1.2 s): detail"
std::string format_result(const CriterionResult& result);

/// Central-difference gradient of kld_projected, step h.
Matrix finite_difference_gradient(const Matrix& a, const GaussianParams& p1,
                                  const GaussianParams& p2, double h = 1e-5);

}  // namespace kldproj::checks

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace kcut {

enum class CriterionStatus { pass, fail, skip };

struct CriterionResult {
  int id = 0;
  std::string name;
  CriterionStatus status = CriterionStatus::fail;
  std::string detail; // the numbers behind the verdict, one line
  std::int64_t wall_time_ms = 0;
};

struct AcceptanceOptions {
  bool quick = false;          // trimmed instance counts, skips the long runs
  std::string gset_dir = "data/gset";
};

/// Runs the full verification suite: exactness against the exhaustive
/// oracle, vertex residuals, candidate-count scaling, worker-count
/// determinism, cut/form consistency, GSet reproduction (when the files are
/// present locally), the toroidal proxy, pipeline sanity, perturbation-bound
/// diagnostics, Gaussian norm ceiling, baselines, and the runtime budget.
/// One result per criterion, in order; criteria whose inputs are absent are
/// skipped rather than failed.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts = {});

/// True when nothing failed (skips count as passes).
bool all_passed(const std::vector<CriterionResult>& results);

/// "PASS" / "FAIL" / "SKIP".
const char* to_string(CriterionStatus s);

} // namespace kcut

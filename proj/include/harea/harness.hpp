#pragma once

#include "harea/solver.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace harea {

enum class CheckId {
  affine_unique,
  comparison,
  contraction,
  shift_equivariance,
  translation_covariance,
  submodularity_aniso,
  vee_wedge_iso,
  lavrentiev,
  barrier_sandwich,
  lipschitz_bound,
  euler_residual_es1,
  example_es1,
  example_es2,
  restriction,
  calibration_disk,
};

inline constexpr std::array<CheckId, 15> kAllChecks{
    CheckId::affine_unique,      CheckId::comparison,         CheckId::contraction,
    CheckId::shift_equivariance, CheckId::translation_covariance, CheckId::submodularity_aniso,
    CheckId::vee_wedge_iso,      CheckId::lavrentiev,         CheckId::barrier_sandwich,
    CheckId::lipschitz_bound,    CheckId::euler_residual_es1, CheckId::example_es1,
    CheckId::example_es2,        CheckId::restriction,        CheckId::calibration_disk,
};

std::string to_string(CheckId id);
/// Throws ConfigError on an unknown name.
CheckId parse_check_id(const std::string& name);

/// A measured value with an optional pass threshold (value <= threshold, or >= when
/// `upper` is false). Metrics without a threshold are informational.
struct Metric {
  double value = 0.0;
  std::optional<double> threshold;
  bool upper = true;
  bool ok() const;
};

struct TestReport {
  CheckId id = CheckId::affine_unique;
  bool passed = false;
  std::map<std::string, Metric> metrics;
  std::map<std::string, std::string> config;
  double runtime = 0.0;
  /// Set when the check aborted (e.g. solver divergence).
  std::string reason;
};

struct CheckOptions {
  SolverConfig solver;
  /// Overrides the check's default spacing for its main grid.
  std::optional<double> h;
};

TestReport run_check(CheckId id, const CheckOptions& opts = {});

struct SuiteResult {
  std::vector<TestReport> reports;
  int passed = 0;
  int total = 0;
  bool all_passed() const { return passed == total; }
};

/// Checks run in declared CheckId order regardless of the order given.
SuiteResult run_suite(const std::vector<CheckId>& filter, const CheckOptions& opts = {});

}  // namespace harea

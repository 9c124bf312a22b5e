#pragma once

// Seeded sampling, residual checks and the JSON verification report.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "skcone/types.hpp"

namespace skcone {

class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class ToleranceClass { Analytic, ChartFd, Invariance };

struct ToleranceProfile {
  double analytic = 1e-9;
  double chart_fd = 1e-5;
  double invariance = 1e-7;

  double of(ToleranceClass c) const;
  /// Throws ConfigError unless all positive and analytic <= chart_fd.
  void validate() const;
};

struct SuiteConfig {
  std::string prepotential;
  int n_vars = 0;
  std::uint64_t seed = 1;
  int sample_count = 64;
  CVec base_point;
  double sample_radius = 0.0;
  std::vector<std::string> checks;  ///< {"all"} selects every registered check
  ToleranceProfile tolerances;
  std::string output_path;
  std::size_t attempt_budget = 0;   ///< 0 means 100 * sample_count
};

SuiteConfig parse_config(const std::string& json_text);
SuiteConfig load_config(const std::string& path);

struct CheckInfo {
  std::string id;
  ToleranceClass cls;
  double factor;      ///< tolerance = profile.of(cls) * factor
  bool per_sample;    ///< false: one result for the whole sample set
  bool on_sphere;     ///< evaluated at the sample projected to |k| = 1/2
};

const std::vector<CheckInfo>& check_registry();
const CheckInfo& check_info(const std::string& id);

struct CheckResult {
  std::string id;
  std::size_t sample = 0;
  CVec point;          ///< input the residual was computed at (empty for set-level checks)
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string error;   ///< nonempty when the check threw
};

struct CheckSummary {
  std::size_t count = 0;
  std::size_t passed = 0;
  double max_residual = 0.0;
};

struct VerificationReport {
  std::string prepotential;
  int n_vars = 0;
  std::uint64_t seed = 0;
  std::map<std::string, double> fitted_constants;
  std::vector<CheckResult> checks;
  std::map<std::string, CheckSummary> summary;

  bool all_passed() const;
  std::size_t passed_count() const;
};

/// Deterministic admissible perturbations of the base point.
std::vector<CVec> sample_points(const SuiteConfig& config);

/// Runs the selected checks; per-sample work is spread over `threads`
/// workers and the results are sorted by (check id, sample index).
VerificationReport run_suite(const SuiteConfig& config, unsigned threads = 1);

std::string report_to_json(const VerificationReport& report);

}  // namespace skcone

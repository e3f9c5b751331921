#pragma once

// End-to-end conditional independence test: transform, then one permutation
// test per requested statistic.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "pcit/permutation.hpp"
#include "pcit/transform.hpp"

namespace pcit {

struct RunRequest {
  std::string input;  // "digoxin" or the CSV path, echoed in the report
  Sample sample;
  EstimatorConfig config;
  std::vector<StatisticSpec> statistics;
  PermutationOptions permutation;
};

struct Timing {
  std::string stage;
  double seconds = 0.0;
};

struct RunReport {
  std::string input;
  std::size_t n = 0;
  EstimatorConfig config;
  std::vector<TestResult> results;  // one per requested statistic, in request order
  double ks_u = 0.0;
  double ks_v = 0.0;
  std::vector<Timing> timings;
};

RunReport cmd_test(const RunRequest& request);

/// Timings are excluded unless requested so that reports are reproducible
/// byte for byte.
nlohmann::json to_json(const RunReport& report, bool include_timings = false);
std::string format_report_table(const RunReport& report);
/// statistic,sided,observed,p_value,exceedances,resamples,mode,seed
void write_results_csv(std::ostream& out, const RunReport& report);

struct SensitivityRow {
  std::string statistic;
  Sidedness sidedness = Sidedness::two_sided;
  bool leave_one_out = false;
  double observed = 0.0;
  double p_value = 1.0;
};

/// Every statistic under both sidedness conventions, with in-sample and
/// leave-one-out estimation. One null distribution per (statistic, estimation).
std::vector<SensitivityRow> sensitivity_report(const Sample& sample,
                                               const EstimatorConfig& config,
                                               const std::vector<StatisticSpec>& statistics,
                                               const PermutationOptions& options);

void write_sensitivity_csv(std::ostream& out, const std::vector<SensitivityRow>& rows);

}  // namespace pcit

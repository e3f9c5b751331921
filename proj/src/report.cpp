#include "pcit/report.hpp"

#include <chrono>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "pcit/io.hpp"

namespace pcit {

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace

RunReport cmd_test(const RunRequest& request) {
  RunReport report{request.input, request.sample.size(), request.config, {}, 0.0, 0.0, {}};
  Stopwatch transform_clock;
  const PseudoSample pseudo = partial_copula_transform(request.sample, request.config);
  report.timings.push_back({"transform", transform_clock.seconds()});
  report.ks_u = uniformity_diagnostic(pseudo.u);
  report.ks_v = uniformity_diagnostic(pseudo.v);
  for (const auto& spec : request.statistics) {
    Stopwatch clock;
    report.results.push_back(permutation_pvalue(pseudo, spec, request.permutation));
    report.timings.push_back({spec.name(), clock.seconds()});
  }
  return report;
}

nlohmann::json to_json(const RunReport& report, bool include_timings) {
  nlohmann::json j;
  j["input"] = report.input;
  j["n"] = report.n;
  j["config"] = to_json(report.config);
  j["diagnostics"] = {{"ks_u", report.ks_u}, {"ks_v", report.ks_v}};
  nlohmann::json results = nlohmann::json::array();
  for (const auto& r : report.results) results.push_back(to_json(r));
  j["results"] = results;
  if (include_timings) {
    nlohmann::json t = nlohmann::json::object();
    for (const auto& timing : report.timings) t[timing.stage] = timing.seconds;
    j["timings_seconds"] = t;
  }
  return j;
}

std::string format_report_table(const RunReport& report) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "input %s  n=%zu  bandwidth=%.6g/%.6g (%s%s)\n",
                report.input.c_str(), report.n, report.config.bandwidth_y().value(),
                report.config.bandwidth_z().value(), to_string(report.config.rule()).c_str(),
                report.config.leave_one_out() ? ", leave-one-out" : "");
  out << line;
  std::snprintf(line, sizeof line, "KS distance to uniform: u %.4f  v %.4f\n", report.ks_u,
                report.ks_v);
  out << line;
  std::snprintf(line, sizeof line, "%-10s %-6s %14s %10s %10s\n", "statistic", "sided",
                "observed", "p-value", "resamples");
  out << line;
  for (const auto& r : report.results) {
    std::snprintf(line, sizeof line, "%-10s %-6s %14.6g %10.5f %10llu\n", r.statistic.c_str(),
                  to_string(r.sidedness).c_str(), r.observed, r.p_value,
                  static_cast<unsigned long long>(r.resamples));
    out << line;
  }
  for (const auto& t : report.timings) {
    std::snprintf(line, sizeof line, "  time %-10s %.3fs\n", t.stage.c_str(), t.seconds);
    out << line;
  }
  return out.str();
}

void write_results_csv(std::ostream& out, const RunReport& report) {
  out << "statistic,sided,observed,p_value,exceedances,resamples,mode,seed\n";
  for (const auto& r : report.results) {
    out << r.statistic << ',' << to_string(r.sidedness) << ',' << format_double(r.observed)
        << ',' << format_double(r.p_value) << ',' << r.exceedances << ',' << r.resamples << ','
        << to_string(r.mode) << ',' << r.seed << '\n';
  }
}

std::vector<SensitivityRow> sensitivity_report(const Sample& sample,
                                               const EstimatorConfig& config,
                                               const std::vector<StatisticSpec>& statistics,
                                               const PermutationOptions& options) {
  std::vector<SensitivityRow> rows;
  for (const bool loo : {false, true}) {
    EstimatorConfig variant = config;
    variant.leave_one_out(loo);
    const PseudoSample pseudo = partial_copula_transform(sample, variant);
    for (const auto& spec : statistics) {
      const auto statistic = make_paired_statistic(spec, pseudo.u, pseudo.v);
      const NullDistribution null = permutation_null(*statistic, options);
      for (const Sidedness side : {Sidedness::two_sided, Sidedness::upper}) {
        rows.push_back({spec.name(), side, loo, null.observed, p_value(null, side)});
      }
    }
  }
  return rows;
}

void write_sensitivity_csv(std::ostream& out, const std::vector<SensitivityRow>& rows) {
  out << "statistic,sided,estimation,observed,p_value\n";
  for (const auto& r : rows) {
    out << r.statistic << ',' << to_string(r.sidedness) << ','
        << (r.leave_one_out ? "leave-one-out" : "in-sample") << ',' << format_double(r.observed)
        << ',' << format_double(r.p_value) << '\n';
  }
}

}  // namespace pcit

// pcit: conditional independence testing with the partial copula transform.
//
//   pcit transform          --data FILE|digoxin [bandwidth flags]
//   pcit test               --data FILE|digoxin --stats pearson,kendall,...
//   pcit simulate           --n 100 --lambda 0.5 --rho 0,0.3,0.6
//   pcit bandwidth-sweep    --n 100 --lambda 0.5 --bandwidths 0.05,0.1,0.2
//   pcit reproduce-digoxin  --out results/

#include <omp.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pcit/error.hpp"
#include "pcit/io.hpp"
#include "pcit/report.hpp"
#include "pcit/simulation.hpp"

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataFlags {
  std::string data = "digoxin";
  std::string x_col = "x", y_col = "y", z_col = "z";
  std::optional<double> bandwidth;
  std::string bandwidth_rule = "silverman";
  bool leave_one_out = false;
};

struct TestFlags {
  std::string stats = "pearson,kendall,hoeffding,kappa,taustar";
  std::uint64_t resamples = 100'000;
  std::uint64_t seed = 20240501;
  std::string sided = "auto";
  std::string mode = "mc";
  std::string estimator = "v";
  std::string out;
  std::string format = "json";
  bool timings = false;
  bool sensitivity = false;
};

struct SimFlags {
  std::size_t n = 100;
  double lambda = 0.5;
  std::vector<double> rho{0.0, 0.3, 0.6};
  std::vector<double> bandwidths;
  double sigma0 = 1.0;
  std::size_t grid_m = 1000;
  std::uint64_t replications = 500;
  std::uint64_t resamples = 500;
  std::uint64_t seed = 20240501;
  std::string stat = "pearson";
  double alpha = 0.05;
  bool fixed_functions = false;
  std::string baseline = "raw";
  std::string sided = "auto";
  std::string format = "csv";
  std::string out;
};

void add_data_flags(CLI::App& cmd, DataFlags& f) {
  cmd.add_option("--data", f.data, "CSV file with a header, or 'digoxin'")
      ->capture_default_str();
  cmd.add_option("--x-col", f.x_col, "Name of the conditioning column")->capture_default_str();
  cmd.add_option("--y-col", f.y_col, "Name of the first response column")->capture_default_str();
  cmd.add_option("--z-col", f.z_col, "Name of the second response column")
      ->capture_default_str();
  cmd.add_option("--bandwidth", f.bandwidth, "Explicit bandwidth; overrides --bandwidth-rule")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--bandwidth-rule", f.bandwidth_rule, "silverman or sim:LAMBDA")
      ->capture_default_str();
  cmd.add_flag("--leave-one-out", f.leave_one_out,
               "Exclude observation i when estimating at X_i");
}

void add_test_flags(CLI::App& cmd, TestFlags& f) {
  cmd.add_option("--stats", f.stats, "Comma-separated statistics")->capture_default_str();
  cmd.add_option("--resamples", f.resamples, "Monte Carlo permutation resamples B")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd.add_option("--seed", f.seed, "Seed for all resampling")->capture_default_str();
  cmd.add_option("--sided", f.sided, "auto, two or upper")
      ->check(CLI::IsMember({"auto", "two", "upper"}))
      ->capture_default_str();
  cmd.add_option("--mode", f.mode, "mc or exhaustive")
      ->check(CLI::IsMember({"mc", "exhaustive"}))
      ->capture_default_str();
  cmd.add_option("--estimator", f.estimator, "v (V-statistics) or u (U-statistics)")
      ->check(CLI::IsMember({"v", "u"}))
      ->capture_default_str();
  cmd.add_option("--out", f.out, "Directory for report.json and pseudo.csv");
  cmd.add_option("--format", f.format, "Standard output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  cmd.add_flag("--timings", f.timings, "Include wall-clock timings in the JSON report");
  cmd.add_flag("--sensitivity", f.sensitivity,
               "Also report both sidedness conventions with in-sample and leave-one-out "
               "estimation");
}

void add_sim_flags(CLI::App& cmd, SimFlags& f, bool sweep) {
  cmd.add_option("--n", f.n, "Sample size")->capture_default_str();
  cmd.add_option("--lambda", f.lambda, "Noise-to-signal ratio")->capture_default_str();
  if (sweep) {
    cmd.add_option("--bandwidths", f.bandwidths, "Comma-separated bandwidth grid")
        ->delimiter(',');
  } else {
    cmd.add_option("--rho", f.rho, "Comma-separated partial correlations")
        ->delimiter(',')
        ->capture_default_str();
  }
  cmd.add_option("--sigma0", f.sigma0, "Signal scale")->capture_default_str();
  cmd.add_option("--grid-m", f.grid_m, "Wiener path grid points")->capture_default_str();
  cmd.add_option("--replications", f.replications, "Simulated datasets per grid point")
      ->capture_default_str();
  cmd.add_option("--resamples", f.resamples, "Permutation resamples per dataset")
      ->capture_default_str();
  cmd.add_option("--seed", f.seed, "Master seed")->capture_default_str();
  cmd.add_option("--stat", f.stat, "Test statistic")->capture_default_str();
  cmd.add_option("--alpha", f.alpha, "Nominal level")->capture_default_str();
  cmd.add_option("--sided", f.sided, "auto, two or upper")
      ->check(CLI::IsMember({"auto", "two", "upper"}))
      ->capture_default_str();
  cmd.add_flag("--fixed-functions", f.fixed_functions,
               "Draw g and h once instead of per replication");
  cmd.add_option("--baseline", f.baseline,
                 "Unconditional comparison: raw (ranks of Y, Z) or errors (exact transform)")
      ->check(CLI::IsMember({"raw", "errors"}))
      ->capture_default_str();
  cmd.add_option("--format", f.format, "csv or json")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  cmd.add_option("--out", f.out, "Directory for the rejection table");
}

std::vector<pcit::StatisticSpec> parse_stats(const std::string& list, pcit::Estimator est) {
  std::vector<pcit::StatisticSpec> specs;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      specs.push_back(pcit::StatisticSpec::of(pcit::parse_statistic_kind(item), est));
    } catch (const pcit::Error& e) {
      throw UsageError(e.what());
    }
  }
  if (specs.empty()) throw UsageError("no statistics requested");
  return specs;
}

pcit::Sample load_sample(const DataFlags& f) {
  if (f.data == "digoxin") return pcit::digoxin_dataset();
  return pcit::load_csv(f.data, {f.x_col, f.y_col, f.z_col});
}

pcit::EstimatorConfig make_config(const DataFlags& f, const pcit::Sample& sample) {
  pcit::EstimatorConfig config = [&] {
    if (f.bandwidth) return pcit::EstimatorConfig::with_bandwidth(*f.bandwidth);
    if (f.bandwidth_rule == "silverman") return pcit::EstimatorConfig::silverman(sample.xs());
    if (f.bandwidth_rule.rfind("sim:", 0) == 0) {
      double lambda = 0.0;
      try {
        lambda = std::stod(f.bandwidth_rule.substr(4));
      } catch (const std::exception&) {
        throw UsageError("--bandwidth-rule sim:LAMBDA needs a number");
      }
      return pcit::EstimatorConfig::simulation(lambda, sample.size());
    }
    throw UsageError("--bandwidth-rule must be 'silverman' or 'sim:LAMBDA'");
  }();
  config.leave_one_out(f.leave_one_out);
  return config;
}

std::optional<pcit::Sidedness> parse_sided(const std::string& s) {
  if (s == "auto") return std::nullopt;
  return pcit::parse_sidedness(s);
}

std::ofstream open_output(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  const auto path = std::filesystem::path(dir) / name;
  std::ofstream out(path);
  if (!out) pcit::fail(pcit::ErrorCode::io_error, "cannot write " + path.string());
  return out;
}

int run_transform(const DataFlags& data, const std::string& out_dir) {
  const pcit::Sample sample = load_sample(data);
  const pcit::EstimatorConfig config = make_config(data, sample);
  const pcit::PseudoSample pseudo = pcit::partial_copula_transform(sample, config);
  pcit::write_pseudo_csv(std::cout, sample, pseudo);
  if (!out_dir.empty()) {
    auto file = open_output(out_dir, "pseudo.csv");
    pcit::write_pseudo_csv(file, sample, pseudo);
  }
  std::cerr << "bandwidth " << config.bandwidth_y().value() << "  KS(u) "
            << pcit::uniformity_diagnostic(pseudo.u) << "  KS(v) "
            << pcit::uniformity_diagnostic(pseudo.v) << '\n';
  return 0;
}

pcit::RunRequest make_request(const DataFlags& data, const TestFlags& t) {
  pcit::Sample sample = load_sample(data);
  pcit::EstimatorConfig config = make_config(data, sample);
  pcit::PermutationOptions perm;
  perm.resamples = t.resamples;
  perm.seed = t.seed;
  perm.mode = pcit::parse_permutation_mode(t.mode);
  perm.sidedness = parse_sided(t.sided);
  return pcit::RunRequest{data.data, std::move(sample), config,
                          parse_stats(t.stats, pcit::parse_estimator(t.estimator)), perm};
}

void emit_report(const pcit::RunRequest& request, const pcit::RunReport& report,
                 const TestFlags& t) {
  const std::string json = to_json(report, t.timings).dump(2) + "\n";
  if (t.format == "json") {
    std::cout << json;
  } else {
    pcit::write_results_csv(std::cout, report);
  }
  std::cerr << pcit::format_report_table(report);
  if (!t.out.empty()) {
    open_output(t.out, "report.json") << json;
    auto pseudo_file = open_output(t.out, "pseudo.csv");
    pcit::write_pseudo_csv(pseudo_file, request.sample,
                           pcit::partial_copula_transform(request.sample, request.config));
  }
}

void emit_sensitivity(const pcit::RunRequest& request, const std::string& out_dir) {
  const auto rows = pcit::sensitivity_report(request.sample, request.config, request.statistics,
                                             request.permutation);
  std::cerr << "sensitivity (both sidedness conventions, in-sample vs leave-one-out):\n";
  pcit::write_sensitivity_csv(std::cerr, rows);
  if (!out_dir.empty()) {
    auto file = open_output(out_dir, "sensitivity.csv");
    pcit::write_sensitivity_csv(file, rows);
  }
}

int run_test(const DataFlags& data, const TestFlags& t) {
  const pcit::RunRequest request = make_request(data, t);
  const pcit::RunReport report = pcit::cmd_test(request);
  emit_report(request, report, t);
  if (t.sensitivity) emit_sensitivity(request, t.out);
  return 0;
}

int run_reproduce(TestFlags t) {
  DataFlags data;
  const pcit::RunRequest request = make_request(data, t);
  const pcit::RunReport report = pcit::cmd_test(request);
  emit_report(request, report, t);
  emit_sensitivity(request, t.out);
  if (!t.out.empty()) {
    auto file = open_output(t.out, "digoxin.csv");
    pcit::write_sample_csv(file, request.sample);
  }
  return 0;
}

int run_simulation(const SimFlags& f, bool sweep) {
  pcit::SimConfig cfg;
  cfg.n = f.n;
  cfg.lambda = f.lambda;
  cfg.sigma0 = f.sigma0;
  cfg.grid_m = f.grid_m;
  cfg.seed = f.seed;
  pcit::StudyOptions opts;
  opts.replications = f.replications;
  opts.resamples = f.resamples;
  opts.alpha = f.alpha;
  opts.redraw_functions = !f.fixed_functions;
  opts.sidedness = parse_sided(f.sided);
  opts.baseline = pcit::parse_unconditional_baseline(f.baseline);
  try {
    opts.statistic = pcit::parse_statistic_kind(f.stat);
  } catch (const pcit::Error& e) {
    throw UsageError(e.what());
  }
  pcit::RejectionTable table;
  if (sweep) {
    std::vector<double> grid = f.bandwidths;
    if (grid.empty()) {
      const double rule = pcit::sim_bandwidth(f.lambda, f.n).value();
      for (double factor : {0.25, 0.5, 1.0, 2.0, 4.0}) grid.push_back(factor * rule);
    }
    table = pcit::run_bandwidth_robustness(cfg, grid, opts);
  } else {
    table = pcit::run_power_study(cfg, f.rho, opts);
  }
  if (f.format == "csv") {
    pcit::write_rejection_csv(std::cout, table);
  } else {
    std::cout << pcit::to_json(table).dump(2) << '\n';
  }
  if (!f.out.empty()) {
    auto file = open_output(f.out, sweep ? "bandwidth_sweep.csv" : "power.csv");
    pcit::write_rejection_csv(file, table);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional independence tests based on the partial copula transform"};
  app.set_config("--config", "", "INI/TOML file with option values (keys mirror the flags)");
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "OpenMP threads (0 = runtime default)");

  DataFlags transform_data;
  std::string transform_out;
  auto* transform = app.add_subcommand("transform", "Write the pseudo-observations x,u,v");
  add_data_flags(*transform, transform_data);
  transform->add_option("--out", transform_out, "Directory for pseudo.csv");

  DataFlags test_data;
  TestFlags test_flags;
  auto* test = app.add_subcommand("test", "Permutation tests of conditional independence");
  add_data_flags(*test, test_data);
  add_test_flags(*test, test_flags);

  SimFlags sim_flags;
  auto* simulate = app.add_subcommand("simulate", "Power and Type I error study");
  add_sim_flags(*simulate, sim_flags, false);

  SimFlags sweep_flags;
  auto* sweep = app.add_subcommand("bandwidth-sweep", "Type I error as a function of bandwidth");
  add_sim_flags(*sweep, sweep_flags, true);

  TestFlags repro_flags;
  auto* repro = app.add_subcommand("reproduce-digoxin",
                                   "Digoxin data: all five tests, sensitivity report and the "
                                   "transformed data");
  repro->add_option("--resamples", repro_flags.resamples, "Permutation resamples")
      ->capture_default_str();
  repro->add_option("--seed", repro_flags.seed, "Seed")->capture_default_str();
  repro->add_option("--out", repro_flags.out, "Output directory");
  repro->add_option("--format", repro_flags.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  if (threads > 0) omp_set_num_threads(threads);

  try {
    if (*transform) return run_transform(transform_data, transform_out);
    if (*test) {
      if (test_flags.mode == "exhaustive" && test_flags.resamples != 100'000) {
        std::cerr << "note: --resamples is ignored in exhaustive mode\n";
      }
      return run_test(test_data, test_flags);
    }
    if (*simulate) return run_simulation(sim_flags, false);
    if (*sweep) return run_simulation(sweep_flags, true);
    if (*repro) return run_reproduce(repro_flags);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const pcit::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

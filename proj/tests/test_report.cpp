#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli_runner.hpp"
#include "pcit/io.hpp"
#include "pcit/report.hpp"

using Catch::Matchers::ContainsSubstring;
using pcit::testing::run_cli;

namespace {

pcit::RunRequest digoxin_request(std::uint64_t resamples) {
  const auto d = pcit::digoxin_dataset();
  std::vector<pcit::StatisticSpec> stats;
  for (auto kind : pcit::builtin_statistic_kinds()) stats.push_back(pcit::StatisticSpec::of(kind));
  pcit::PermutationOptions perm;
  perm.resamples = resamples;
  perm.seed = 42;
  return {"digoxin", d, pcit::EstimatorConfig::silverman(d.xs()), stats, perm};
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("run report has one result per requested statistic", "[report]") {
  const auto request = digoxin_request(200);
  const auto report = pcit::cmd_test(request);
  REQUIRE(report.results.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(report.results[i].kind == request.statistics[i].kind);
    CHECK(report.results[i].resamples == 200);
  }
  CHECK(report.n == 35);
  CHECK(report.ks_u > 0.0);
  CHECK_FALSE(report.timings.empty());

  const auto j = pcit::to_json(report);
  CHECK(j.at("results").size() == 5);
  CHECK_FALSE(j.contains("timings_seconds"));
  CHECK(pcit::to_json(report, true).contains("timings_seconds"));
  CHECK(j.at("config").at("rule") == "silverman");

  const auto table = pcit::format_report_table(report);
  CHECK_THAT(table, ContainsSubstring("taustar"));
  std::ostringstream csv;
  pcit::write_results_csv(csv, report);
  CHECK(csv.str().rfind("statistic,sided,observed,p_value,exceedances,resamples,mode,seed\n", 0) ==
        0);
}

TEST_CASE("sensitivity report covers both conventions", "[report]") {
  const auto request = digoxin_request(100);
  const auto rows = pcit::sensitivity_report(request.sample, request.config, request.statistics,
                                             request.permutation);
  CHECK(rows.size() == 20);
  int loo = 0;
  for (const auto& r : rows) loo += r.leave_one_out ? 1 : 0;
  CHECK(loo == 10);
  std::ostringstream out;
  pcit::write_sensitivity_csv(out, rows);
  CHECK(out.str().rfind("statistic,sided,estimation,observed,p_value\n", 0) == 0);
}

TEST_CASE("cli: test command and bandwidth override", "[cli]") {
  const auto r = run_cli("test --data digoxin --stats pearson,kendall --resamples 200 "
                         "--bandwidth 22.48 2>/dev/null");
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("config").at("rule") == "explicit");
  CHECK(j.at("config").at("bandwidth_y") == 22.48);
  CHECK(j.at("results").size() == 2);
  CHECK(j.at("results")[1].at("statistic") == "kendall");
}

TEST_CASE("cli: unknown statistic is a usage error", "[cli]") {
  const auto r = run_cli("test --stats pearson,spearman 2>&1");
  CHECK(r.status == 2);
  CHECK_THAT(r.out, ContainsSubstring("usage error"));
  CHECK_THAT(r.out, ContainsSubstring("pearson, kendall, hoeffding, kappa, taustar"));
  CHECK(run_cli("frobnicate 2>/dev/null").status != 0);
}

TEST_CASE("cli: failures exit nonzero, p-values do not", "[cli]") {
  CHECK(run_cli("test --data /nonexistent.csv 2>/dev/null").status == 1);
  // a large p-value still completes
  CHECK(run_cli("test --data digoxin --stats kendall --resamples 20 --seed 1 --format csv "
                "2>/dev/null")
            .status == 0);
}

TEST_CASE("cli: repeated runs are byte-identical", "[cli]") {
  const std::string args = "test --data digoxin --resamples 300 --seed 9 2>/dev/null";
  const auto a = run_cli(args);
  const auto b = run_cli(args);
  REQUIRE(a.status == 0);
  CHECK(a.out == b.out);
  CHECK(run_cli("--threads 1 " + args).out == a.out);
}

TEST_CASE("cli: csv input with renamed columns and transform output", "[cli]") {
  const auto dir = scratch_dir("pcit_cli_transform");
  std::filesystem::create_directories(dir);
  const auto csv = dir / "in.csv";
  {
    std::ofstream out(csv);
    out << "creat,clear,urine\n";
    const auto d = pcit::digoxin_dataset();
    for (std::size_t i = 0; i < d.size(); ++i) {
      const auto r = d.row(i);
      out << pcit::format_double(r.x) << ',' << pcit::format_double(r.y) << ','
          << pcit::format_double(r.z) << '\n';
    }
  }
  const auto r = run_cli("transform --data " + csv.string() +
                         " --x-col creat --y-col clear --z-col urine --out " + dir.string() +
                         " 2>/dev/null");
  REQUIRE(r.status == 0);
  std::istringstream in(r.out);
  const auto pairs = pcit::read_pseudo_csv(in);
  const auto d = pcit::digoxin_dataset();
  const auto expected = pcit::partial_copula_transform(d, pcit::EstimatorConfig::silverman(d.xs()));
  CHECK(pairs.u == expected.u);
  CHECK(pairs.v == expected.v);
  CHECK(std::filesystem::exists(dir / "pseudo.csv"));
  CHECK(run_cli("transform --data " + csv.string() + " 2>/dev/null").status == 1);
  std::filesystem::remove_all(dir);
}

TEST_CASE("cli: config file mirrors flags", "[cli]") {
  const auto dir = scratch_dir("pcit_cli_config");
  std::filesystem::create_directories(dir);
  const auto ini = dir / "run.ini";
  {
    std::ofstream out(ini);
    out << "[test]\nstats=\"kendall\"\nresamples=150\nseed=5\nbandwidth=30\n";
  }
  const auto from_file = run_cli("--config " + ini.string() + " test 2>/dev/null");
  const auto from_flags =
      run_cli("test --stats kendall --resamples 150 --seed 5 --bandwidth 30 2>/dev/null");
  REQUIRE(from_file.status == 0);
  CHECK(from_file.out == from_flags.out);
  std::filesystem::remove_all(dir);
}

TEST_CASE("cli: reproduce-digoxin writes its artifacts", "[cli]") {
  const auto dir = scratch_dir("pcit_cli_repro");
  const auto r = run_cli("reproduce-digoxin --resamples 200 --out " + dir.string() + " 2>/dev/null");
  REQUIRE(r.status == 0);
  for (const char* name : {"digoxin.csv", "pseudo.csv", "report.json", "sensitivity.csv"}) {
    CHECK(std::filesystem::exists(dir / name));
  }
  CHECK(pcit::load_csv(dir / "digoxin.csv") == pcit::digoxin_dataset());
  std::filesystem::remove_all(dir);
}

TEST_CASE("cli: simulation commands emit csv", "[cli]") {
  const auto sim = run_cli("simulate --n 30 --rho 0,0.5 --replications 10 --resamples 20 "
                           "2>/dev/null");
  REQUIRE(sim.status == 0);
  std::istringstream in(sim.out);
  CHECK(pcit::read_rejection_csv(in).rows.size() == 2);
  const auto sweep = run_cli("bandwidth-sweep --n 30 --bandwidths 0.1,0.2,0.4 --replications 5 "
                             "--resamples 20 2>/dev/null");
  REQUIRE(sweep.status == 0);
  std::istringstream in2(sweep.out);
  const auto t = pcit::read_rejection_csv(in2);
  REQUIRE(t.rows.size() == 3);
  CHECK(t.rows[2].bandwidth == 0.4);
  CHECK(run_cli("simulate --stat nope 2>/dev/null").status == 2);
}

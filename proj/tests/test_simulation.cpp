#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "pcit/error.hpp"
#include "pcit/simulation.hpp"

using Catch::Matchers::WithinAbs;
using pcit::SimConfig;

namespace {

SimConfig config(std::size_t n, double rho, std::uint64_t seed) {
  SimConfig c;
  c.n = n;
  c.rho = rho;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("config validation", "[sim]") {
  SimConfig c;
  CHECK_NOTHROW(c.validate());
  c.lambda = 0.0;
  CHECK_THROWS_AS(c.validate(), pcit::Error);
  c = SimConfig{};
  c.rho = 1.5;
  CHECK_THROWS_AS(c.validate(), pcit::Error);
  c = SimConfig{};
  c.grid_m = 1;
  CHECK_THROWS_AS(c.validate(), pcit::Error);
  c = SimConfig{};
  c.n = 1;
  CHECK_THROWS_AS(c.validate(), pcit::Error);
  c = SimConfig{};
  c.sigma0 = -1.0;
  CHECK_THROWS_AS(c.validate(), pcit::Error);
}

TEST_CASE("signal path interpolates linearly", "[wiener]") {
  const pcit::SignalPath g({0.0, 1.0, 3.0});
  CHECK(g(0.0) == 0.0);
  CHECK(g(0.25) == 0.5);
  CHECK(g(0.5) == 1.0);
  CHECK(g(0.75) == 2.0);
  CHECK(g(1.0) == 3.0);
  CHECK(g(1.5) == 3.0);
  CHECK(g(-0.5) == 0.0);
  CHECK_THROWS_AS(pcit::SignalPath({1.0}), pcit::Error);
}

TEST_CASE("integrated wiener paths", "[wiener]") {
  const auto zero = pcit::integrated_wiener(0.0, 100, 5);
  for (double v : zero.values()) CHECK(v == 0.0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = pcit::integrated_wiener(1.0, 50 + seed, seed);
    CHECK(g.values().front() == 0.0);
    CHECK(g(0.0) == 0.0);
    CHECK(g.grid_size() == 50 + seed);
  }
  CHECK(pcit::integrated_wiener(1.0, 100, 1).values()[50] !=
        pcit::integrated_wiener(1.0, 100, 2).values()[50]);
}

TEST_CASE("integrated wiener variance at one", "[wiener][property]") {
  for (double sigma0 : {1.0, 2.0}) {
    double sum = 0.0, sumsq = 0.0;
    const int paths = 2000;
    for (int k = 0; k < paths; ++k) {
      const double g1 = pcit::integrated_wiener(sigma0, 1000, 1000 + k)(1.0);
      sum += g1;
      sumsq += g1 * g1;
    }
    const double mean = sum / paths;
    const double var = (sumsq - paths * mean * mean) / (paths - 1);
    CHECK(std::abs(var - sigma0 * sigma0 / 3.0) <= 0.15 * sigma0 * sigma0 / 3.0);
  }
}

TEST_CASE("dataset generation follows the model", "[sim]") {
  const auto data = pcit::gen_dataset(config(100'000, 0.4, 12));
  const auto& s = data.sample;
  REQUIRE(s.size() == 100'000);
  CHECK(data.noise_sd == 0.5);
  double my = 0.0, mz = 0.0;
  std::vector<double> ey(s.size()), ez(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto r = s.row(i);
    REQUIRE(r.x >= 0.0);
    REQUIRE(r.x <= 1.0);
    ey[i] = r.y - data.g(r.x);
    ez[i] = r.z - data.h(r.x);
    my += ey[i];
    mz += ez[i];
  }
  const double n = static_cast<double>(s.size());
  my /= n;
  mz /= n;
  double vy = 0.0, vz = 0.0, cyz = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    vy += (ey[i] - my) * (ey[i] - my);
    vz += (ez[i] - mz) * (ez[i] - mz);
    cyz += (ey[i] - my) * (ez[i] - mz);
  }
  CHECK(std::abs(my) < 0.01);
  CHECK_THAT(std::sqrt(vy / (n - 1)), WithinAbs(0.5, 0.01));
  CHECK_THAT(std::sqrt(vz / (n - 1)), WithinAbs(0.5, 0.01));
  CHECK_THAT(cyz / std::sqrt(vy * vz), WithinAbs(0.4, 0.01));
}

TEST_CASE("g and h come from separate streams", "[sim]") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto data = pcit::gen_dataset(config(10, 0.0, seed));
    CHECK(data.g.values()[500] != data.h.values()[500]);
  }
}

TEST_CASE("perfectly correlated errors", "[sim]") {
  const auto data = pcit::gen_dataset(config(500, 1.0, 3));
  for (std::size_t i = 0; i < data.sample.size(); ++i) {
    const auto r = data.sample.row(i);
    CHECK_THAT(r.z - data.h(r.x), WithinAbs(r.y - data.g(r.x), 1e-12));
  }
}

TEST_CASE("generation is deterministic and reuses supplied paths", "[sim]") {
  const auto a = pcit::gen_dataset(config(50, 0.3, 8));
  const auto b = pcit::gen_dataset(config(50, 0.3, 8));
  CHECK(a.sample == b.sample);
  const auto c = pcit::gen_dataset(config(50, 0.3, 9), a.g, a.h);
  CHECK(c.g.values()[10] == a.g.values()[10]);
  CHECK_FALSE(c.sample == a.sample);
}

TEST_CASE("true copula transform is uniform", "[sim]") {
  const auto data = pcit::gen_dataset(config(20'000, 0.0, 4));
  const auto pairs = pcit::true_copula_transform(data);
  double mean = 0.0;
  for (double u : pairs.u) {
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    mean += u;
  }
  CHECK_THAT(mean / pairs.u.size(), WithinAbs(0.5, 0.01));
}

TEST_CASE("power study plumbing", "[study]") {
  pcit::StudyOptions opts;
  opts.replications = 20;
  opts.resamples = 50;
  const std::vector<double> rhos{0.0, 0.9};
  const auto t1 = pcit::run_power_study(config(40, 0.0, 5), rhos, opts);
  REQUIRE(t1.rows.size() == 2);
  CHECK(t1.rows[0].rho == 0.0);
  CHECK(t1.rows[1].rho == 0.9);
  CHECK(t1.rows[1].conditional_rate > t1.rows[0].conditional_rate);
  for (const auto& row : t1.rows) {
    CHECK(row.replications == 20);
    CHECK(row.resamples == 50);
    CHECK(row.bandwidth == pcit::sim_bandwidth(0.5, 40).value());
    CHECK(row.conditional_rate >= 0.0);
    CHECK(row.conditional_rate <= 1.0);
  }
  CHECK(pcit::run_power_study(config(40, 0.0, 5), rhos, opts) == t1);

  auto serial = opts;
  serial.execution = pcit::Execution::serial;
  CHECK(pcit::run_power_study(config(40, 0.0, 5), rhos, serial) == t1);

  auto none = opts;
  none.replications = 0;
  CHECK_THROWS_AS(pcit::run_power_study(config(40, 0.0, 5), rhos, none), pcit::Error);
  CHECK_THROWS_AS(pcit::run_power_study(config(40, 0.0, 5), std::vector<double>{}, opts),
                  pcit::Error);
}

TEST_CASE("bandwidth sweep has one row per bandwidth", "[study]") {
  pcit::StudyOptions opts;
  opts.replications = 10;
  opts.resamples = 30;
  const std::vector<double> grid{0.3, 0.05, 0.1};
  const auto t = pcit::run_bandwidth_robustness(config(30, 0.7, 6), grid, opts);
  REQUIRE(t.rows.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(t.rows[i].bandwidth == grid[i]);
    CHECK(t.rows[i].rho == 0.0);
  }
  CHECK(pcit::run_bandwidth_robustness(config(30, 0.7, 6), grid, opts) == t);
  CHECK_THROWS_AS(pcit::run_bandwidth_robustness(config(30, 0.0, 6), std::vector<double>{}, opts),
                  pcit::Error);
  CHECK_THROWS_AS(
      pcit::run_bandwidth_robustness(config(30, 0.0, 6), std::vector<double>{0.1, -1.0}, opts),
      pcit::Error);
}

TEST_CASE("unconditional baselines", "[study]") {
  CHECK(pcit::parse_unconditional_baseline("raw") == pcit::UnconditionalBaseline::raw_ranks);
  CHECK(pcit::parse_unconditional_baseline("errors") == pcit::UnconditionalBaseline::true_errors);
  CHECK(pcit::to_string(pcit::UnconditionalBaseline::true_errors) == "errors");
  CHECK_THROWS_AS(pcit::parse_unconditional_baseline("oracle"), pcit::Error);

  pcit::StudyOptions raw;
  raw.replications = 15;
  raw.resamples = 40;
  auto errors = raw;
  errors.baseline = pcit::UnconditionalBaseline::true_errors;
  const std::vector<double> rho{0.5};
  const auto a = pcit::run_power_study(config(40, 0.0, 2), rho, raw);
  const auto b = pcit::run_power_study(config(40, 0.0, 2), rho, errors);
  // the conditional column does not depend on the baseline
  CHECK(a.rows[0].conditional_rate == b.rows[0].conditional_rate);
}

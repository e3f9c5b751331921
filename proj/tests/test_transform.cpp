#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pcit/error.hpp"
#include "pcit/io.hpp"
#include "pcit/transform.hpp"
#include "support.hpp"

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using pcit::EstimatorConfig;
using pcit::Sample;

TEST_CASE("sample validation", "[sample]") {
  CHECK_THROWS_AS(Sample(std::vector<double>{}, {}, {}), pcit::Error);
  CHECK_THROWS_AS(Sample({1.0, 2.0}, {1.0}, {1.0, 2.0}), pcit::Error);
  CHECK_THROWS_AS(Sample({1.0}, {NAN}, {1.0}), pcit::Error);
  const std::vector<pcit::Observation> rows{{1, 2, 3}, {4, 5, 6}};
  const Sample s(rows);
  CHECK(s.size() == 2);
  CHECK(s.row(1) == pcit::Observation{4, 5, 6});
  CHECK(s == Sample({1, 4}, {2, 5}, {3, 6}));
}

TEST_CASE("single observation maps to (1, 1)", "[transform]") {
  const Sample s({0.3}, {2.0}, {-1.0});
  const auto pseudo = pcit::partial_copula_transform(s, EstimatorConfig::with_bandwidth(1.0));
  REQUIRE(pseudo.size() == 1);
  CHECK(pseudo.u[0] == 1.0);
  CHECK(pseudo.v[0] == 1.0);
}

TEST_CASE("digoxin first row against the direct evaluation", "[transform]") {
  const auto digoxin = pcit::digoxin_dataset();
  const auto at_rule =
      pcit::partial_copula_transform(digoxin, EstimatorConfig::silverman(digoxin.xs()));
  CHECK_THAT(at_rule.u[0], WithinAbs(0.25973143916166874, 1e-13));
  CHECK_THAT(at_rule.v[0], WithinAbs(0.44891298697177806, 1e-13));
  CHECK(at_rule.config.rule() == pcit::BandwidthRule::silverman);

  const auto fixed = pcit::partial_copula_transform(digoxin, EstimatorConfig::with_bandwidth(22.48));
  CHECK_THAT(fixed.u[0], WithinAbs(0.25970238043671323, 1e-13));
  CHECK_THAT(fixed.v[0], WithinAbs(0.4489046151818483, 1e-13));
}

TEST_CASE("transform matches per-row conditional cdf calls", "[transform]") {
  const auto digoxin = pcit::digoxin_dataset();
  const auto cfg = EstimatorConfig::with_bandwidths(15.0, 30.0);
  const auto pseudo = pcit::partial_copula_transform(digoxin, cfg);
  for (std::size_t i = 0; i < digoxin.size(); ++i) {
    const auto r = digoxin.row(i);
    CHECK(pseudo.u[i] == pcit::nw_conditional_cdf(digoxin.xs(), digoxin.ys(), cfg.kernel(),
                                                  cfg.bandwidth_y(), r.x, r.y));
    CHECK(pseudo.v[i] == pcit::nw_conditional_cdf(digoxin.xs(), digoxin.zs(), cfg.kernel(),
                                                  cfg.bandwidth_z(), r.x, r.z));
  }
}

TEST_CASE("flat-weight limit gives unconditional ranks", "[transform][property]") {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 1 + rep % 15;
    Sample s(pcit::testing::uniform_vector(rng, n), pcit::testing::tied_vector(rng, n, 5),
             pcit::testing::normal_vector(rng, n));
    const auto pseudo = pcit::partial_copula_transform(s, EstimatorConfig::with_bandwidth(1e200));
    for (std::size_t i = 0; i < n; ++i) {
      const auto ys = s.ys();
      const double ecdf =
          static_cast<double>(std::count_if(ys.begin(), ys.end(),
                                            [&](double y) { return y <= ys[i]; })) /
          static_cast<double>(n);
      CHECK_THAT(pseudo.u[i], WithinAbs(ecdf, 1e-14));
    }
  }
}

TEST_CASE("pseudo-observations lie in (0, 1]", "[transform][property]") {
  std::mt19937_64 rng(22);
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t n = 2 + rep;
    Sample s(pcit::testing::uniform_vector(rng, n), pcit::testing::normal_vector(rng, n),
             pcit::testing::normal_vector(rng, n));
    const auto pseudo =
        pcit::partial_copula_transform(s, EstimatorConfig::with_bandwidth(0.01 + 0.01 * rep));
    for (std::size_t i = 0; i < n; ++i) {
      REQUIRE(pseudo.u[i] > 0.0);
      REQUIRE(pseudo.u[i] <= 1.0);
      REQUIRE(pseudo.v[i] > 0.0);
      REQUIRE(pseudo.v[i] <= 1.0);
    }
  }
}

TEST_CASE("transform is invariant under increasing maps of y and z", "[transform][property]") {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 3 + rep;
    auto xs = pcit::testing::uniform_vector(rng, n);
    auto ys = pcit::testing::normal_vector(rng, n);
    auto zs = pcit::testing::normal_vector(rng, n);
    std::vector<double> ys2(ys), zs2(zs);
    for (auto& y : ys2) y = std::exp(y) + 5.0;
    for (auto& z : zs2) z = z * z * z;
    const auto cfg = EstimatorConfig::with_bandwidth(0.2);
    const auto a = pcit::partial_copula_transform(Sample(xs, ys, zs), cfg);
    const auto b = pcit::partial_copula_transform(Sample(xs, ys2, zs2), cfg);
    CHECK(a.u == b.u);
    CHECK(a.v == b.v);
  }
}

TEST_CASE("leave-one-out drops the self term", "[transform]") {
  const Sample s({0.0, 0.0, 0.0}, {1.0, 2.0, 3.0}, {3.0, 2.0, 1.0});
  auto cfg = EstimatorConfig::with_bandwidth(1.0);
  cfg.leave_one_out(true);
  const auto pseudo = pcit::partial_copula_transform(s, cfg);
  CHECK(pseudo.u == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(pseudo.v == std::vector<double>{1.0, 0.5, 0.0});
  CHECK(pseudo.config.leave_one_out());
}

TEST_CASE("degenerate weights name the row", "[transform]") {
  const Sample s({0.0, 1000.0}, {1.0, 2.0}, {1.0, 2.0});
  auto cfg = EstimatorConfig::with_bandwidth(1.0);
  cfg.leave_one_out(true);
  try {
    pcit::partial_copula_transform(s, cfg);
    FAIL("expected degenerate weights");
  } catch (const pcit::Error& e) {
    CHECK(e.code() == pcit::ErrorCode::degenerate_weights);
    CHECK_THAT(std::string(e.what()), ContainsSubstring("row 0"));
  }
}

TEST_CASE("uniformity diagnostic", "[diagnostic]") {
  CHECK(pcit::uniformity_diagnostic(std::vector<double>{0.5}) == 0.5);
  CHECK(pcit::uniformity_diagnostic(std::vector<double>{0.25, 0.75}) == 0.25);
  CHECK(pcit::uniformity_diagnostic(std::vector<double>{1.0}) == 1.0);
  CHECK_THROWS_AS(pcit::uniformity_diagnostic(std::vector<double>{}), pcit::Error);
  std::mt19937_64 rng(24);
  const auto many = pcit::testing::uniform_vector(rng, 20000);
  CHECK(pcit::uniformity_diagnostic(many) < 0.02);
}

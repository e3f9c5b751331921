#pragma once

// Simulation model: Y = g(x) + e_Y, Z = h(x) + e_Z with x ~ U[0, 1], g and h
// independent integrated Wiener processes scaled by sigma0, and (e_Y, e_Z)
// bivariate normal with common sd lambda * sigma0 and correlation rho.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "pcit/permutation.hpp"
#include "pcit/statistics.hpp"
#include "pcit/transform.hpp"

namespace pcit {

struct SimConfig {
  std::size_t n = 100;
  double lambda = 0.5;
  double rho = 0.0;
  double sigma0 = 1.0;
  std::size_t grid_m = 1000;
  std::uint64_t seed = 0;

  void validate() const;
};

// Piecewise-linear path on grid_m equally spaced points of [0, 1].
class SignalPath {
 public:
  explicit SignalPath(std::vector<double> values);

  std::size_t grid_size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator()(double x) const;

 private:
  std::vector<double> values_;
};

/// g(x) = sigma0 * int_0^x W_t dt: W from independent N(0, 1/(m-1))
/// increments, integrated with the trapezoidal rule.
SignalPath integrated_wiener(double sigma0, std::size_t grid_m, std::mt19937_64& rng);
SignalPath integrated_wiener(double sigma0, std::size_t grid_m, std::uint64_t seed);

struct SimulatedData {
  Sample sample;
  SignalPath g;
  SignalPath h;
  double noise_sd;
};

/// Fresh g, h and data; every random component has its own stream of cfg.seed.
SimulatedData gen_dataset(const SimConfig& cfg);
/// Same, but with the signal paths held fixed.
SimulatedData gen_dataset(const SimConfig& cfg, const SignalPath& g, const SignalPath& h);

struct CopulaPairs {
  std::vector<double> u;
  std::vector<double> v;
};

/// The exact transform u_i = Phi((y_i - g(x_i)) / sd), v_i likewise.
CopulaPairs true_copula_transform(const SimulatedData& data);

// Comparison test reported as unconditional_rate. raw_ranks: the same
// permutation test on ranks of the raw (Y, Z). true_errors: the same test on
// the exact transform, i.e. with g, h and the noise law known.
enum class UnconditionalBaseline { raw_ranks, true_errors };
std::string to_string(UnconditionalBaseline baseline);  // "raw" / "errors"
UnconditionalBaseline parse_unconditional_baseline(const std::string& name);

struct StudyOptions {
  std::uint64_t replications = 500;
  std::uint64_t resamples = 500;
  double alpha = 0.05;
  StatisticKind statistic = StatisticKind::pearson;
  std::optional<Sidedness> sidedness;
  bool redraw_functions = true;
  UnconditionalBaseline baseline = UnconditionalBaseline::raw_ranks;
  Execution execution = Execution::parallel;
};

struct RejectionRow {
  double rho = 0.0;
  std::size_t n = 0;
  double lambda = 0.0;
  double bandwidth = 0.0;
  StatisticKind statistic = StatisticKind::pearson;
  double conditional_rate = 0.0;
  double unconditional_rate = 0.0;
  std::uint64_t replications = 0;
  std::uint64_t resamples = 0;

  friend bool operator==(const RejectionRow&, const RejectionRow&) = default;
};

struct RejectionTable {
  std::vector<RejectionRow> rows;

  friend bool operator==(const RejectionTable&, const RejectionTable&) = default;
};

/// One row per rho: rejection rates at level alpha for the conditional test
/// (transform with bandwidth 1.75 sqrt(lambda / n)) and the unconditional test
/// on the ranks of the raw (Y, Z). Replication r uses the same data streams
/// for every rho.
RejectionTable run_power_study(const SimConfig& base, std::span<const double> rho_grid,
                               const StudyOptions& options);

/// Type I error (rho forced to 0) for each explicit bandwidth, in grid order.
RejectionTable run_bandwidth_robustness(const SimConfig& base,
                                        std::span<const double> bandwidth_grid,
                                        const StudyOptions& options);

}  // namespace pcit

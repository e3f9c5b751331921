#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pcit/kernel_cdf.hpp"
#include "pcit/statistics.hpp"

namespace pcit {

struct PseudoSample;

enum class PermutationMode { monte_carlo, exhaustive };
enum class Execution { serial, parallel };

std::string to_string(PermutationMode mode);  // "mc" / "exhaustive"
PermutationMode parse_permutation_mode(const std::string& name);

struct PermutationOptions {
  std::uint64_t resamples = 100'000;  // Monte Carlo mode only
  std::uint64_t seed = 0;
  PermutationMode mode = PermutationMode::monte_carlo;
  std::optional<Sidedness> sidedness;           // overrides the statistic default
  std::uint64_t exhaustive_budget = 3'628'800;  // 10!
  Execution execution = Execution::parallel;
};

// Statistic values under resampling of v. Monte Carlo entry b uses
// permutation stream b of the seed; exhaustive entry k is the k-th
// permutation in lexicographic order (entry 0 is the identity).
struct NullDistribution {
  double observed = 0.0;
  std::vector<double> values;
  PermutationMode mode = PermutationMode::monte_carlo;
};

NullDistribution permutation_null(const PairedStatistic& statistic,
                                  const PermutationOptions& options);

/// Uniform random permutation of 0..n-1 drawn from stream `index` of `seed`.
std::vector<std::uint32_t> resample_permutation(std::size_t n, std::uint64_t seed,
                                                std::uint64_t index);

/// k-th permutation of 0..n-1 in lexicographic order.
std::vector<std::uint32_t> nth_permutation(std::size_t n, std::uint64_t k);

/// T_b >= T_0 (upper) or |T_b| >= |T_0| (two-sided), with a relative
/// tolerance of 1e-12 so rounding never splits mathematically tied values.
bool exceeds(double resampled, double observed, Sidedness sidedness) noexcept;

std::uint64_t count_exceedances(const NullDistribution& null, Sidedness sidedness);

/// (1 + #exceed) / (B + 1) for Monte Carlo, #exceed / n! for exhaustive.
double p_value(const NullDistribution& null, Sidedness sidedness);

struct TestResult {
  std::string statistic;
  StatisticKind kind = StatisticKind::pearson;
  Sidedness sidedness = Sidedness::two_sided;
  Estimator estimator = Estimator::v_statistic;
  double observed = 0.0;
  double p_value = 1.0;
  std::uint64_t exceedances = 0;
  std::uint64_t resamples = 0;
  PermutationMode mode = PermutationMode::monte_carlo;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::optional<EstimatorConfig> config;
};

TestResult summarize(const NullDistribution& null, const StatisticSpec& spec,
                     Sidedness sidedness, const PermutationOptions& options, std::size_t n);

TestResult permutation_pvalue(std::span<const double> us, std::span<const double> vs,
                              const StatisticSpec& spec, const PermutationOptions& options);

TestResult permutation_pvalue(const PseudoSample& pseudo, const StatisticSpec& spec,
                              const PermutationOptions& options);

}  // namespace pcit

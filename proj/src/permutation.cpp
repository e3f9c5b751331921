#include "pcit/permutation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>

#include "pcit/error.hpp"
#include "pcit/random.hpp"
#include "pcit/transform.hpp"

namespace pcit {

namespace {

std::uint64_t factorial_within(std::size_t n, std::uint64_t budget) {
  std::uint64_t f = 1;
  for (std::size_t k = 2; k <= n; ++k) {
    if (f > budget / k) {
      fail(ErrorCode::budget_exceeded,
           std::to_string(n) + "! permutations exceed the exhaustive budget of " +
               std::to_string(budget));
    }
    f *= k;
  }
  return f;
}

template <typename Body>
void run_indexed(std::uint64_t count, Execution execution, Body&& body) {
  if (execution == Execution::serial) {
    for (std::uint64_t b = 0; b < count; ++b) body(b);
    return;
  }
  std::exception_ptr error;
  const auto total = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic, 256)
  for (std::int64_t b = 0; b < total; ++b) {
    try {
      body(static_cast<std::uint64_t>(b));
    } catch (...) {
#pragma omp critical(pcit_permutation_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

std::string to_string(PermutationMode mode) {
  return mode == PermutationMode::monte_carlo ? "mc" : "exhaustive";
}

PermutationMode parse_permutation_mode(const std::string& name) {
  if (name == "mc" || name == "monte_carlo") return PermutationMode::monte_carlo;
  if (name == "exhaustive") return PermutationMode::exhaustive;
  fail(ErrorCode::invalid_argument, "unknown mode '" + name + "' (valid: mc, exhaustive)");
}

std::vector<std::uint32_t> resample_permutation(std::size_t n, std::uint64_t seed,
                                                std::uint64_t index) {
  std::vector<std::uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  auto rng = make_stream(seed, index);
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

std::vector<std::uint32_t> nth_permutation(std::size_t n, std::uint64_t k) {
  std::vector<std::uint32_t> pool(n);
  std::iota(pool.begin(), pool.end(), 0u);
  std::vector<std::uint64_t> fact(n + 1, 1);
  for (std::size_t i = 1; i <= n; ++i) fact[i] = fact[i - 1] * i;
  std::vector<std::uint32_t> perm;
  perm.reserve(n);
  for (std::size_t i = n; i > 0; --i) {
    const std::uint64_t digit = k / fact[i - 1];
    k %= fact[i - 1];
    perm.push_back(pool[digit]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(digit));
  }
  return perm;
}

NullDistribution permutation_null(const PairedStatistic& statistic,
                                  const PermutationOptions& options) {
  const std::size_t n = statistic.size();
  if (n < 2) fail(ErrorCode::invalid_argument, "permutation test needs n >= 2");
  NullDistribution null;
  null.mode = options.mode;
  null.observed = statistic.observed();
  if (options.mode == PermutationMode::monte_carlo) {
    if (options.resamples < 1) fail(ErrorCode::invalid_argument, "resamples must be >= 1");
    null.values.resize(options.resamples);
    run_indexed(options.resamples, options.execution, [&](std::uint64_t b) {
      null.values[b] = statistic.evaluate(resample_permutation(n, options.seed, b));
    });
  } else {
    const std::uint64_t total = factorial_within(n, options.exhaustive_budget);
    null.values.resize(total);
    run_indexed(total, options.execution, [&](std::uint64_t k) {
      null.values[k] = statistic.evaluate(nth_permutation(n, k));
    });
  }
  return null;
}

bool exceeds(double resampled, double observed, Sidedness sidedness) noexcept {
  constexpr double kRelTol = 1e-12;
  constexpr double kAbsTol = 1e-15;
  if (sidedness == Sidedness::two_sided) {
    const double t0 = std::abs(observed);
    return std::abs(resampled) >= t0 - (kRelTol * t0 + kAbsTol);
  }
  return resampled >= observed - (kRelTol * std::abs(observed) + kAbsTol);
}

std::uint64_t count_exceedances(const NullDistribution& null, Sidedness sidedness) {
  return static_cast<std::uint64_t>(
      std::count_if(null.values.begin(), null.values.end(),
                    [&](double t) { return exceeds(t, null.observed, sidedness); }));
}

double p_value(const NullDistribution& null, Sidedness sidedness) {
  const auto hits = static_cast<double>(count_exceedances(null, sidedness));
  const auto total = static_cast<double>(null.values.size());
  if (null.mode == PermutationMode::monte_carlo) return (1.0 + hits) / (total + 1.0);
  return hits / total;
}

TestResult summarize(const NullDistribution& null, const StatisticSpec& spec,
                     Sidedness sidedness, const PermutationOptions& options, std::size_t n) {
  TestResult r;
  r.statistic = spec.name();
  r.kind = spec.kind;
  r.sidedness = sidedness;
  r.estimator = spec.estimator;
  r.observed = null.observed;
  r.exceedances = count_exceedances(null, sidedness);
  r.p_value = p_value(null, sidedness);
  r.resamples = null.values.size();
  r.mode = null.mode;
  r.seed = options.seed;
  r.n = n;
  return r;
}

TestResult permutation_pvalue(std::span<const double> us, std::span<const double> vs,
                              const StatisticSpec& spec, const PermutationOptions& options) {
  const auto statistic = make_paired_statistic(spec, us, vs);
  const NullDistribution null = permutation_null(*statistic, options);
  return summarize(null, spec, options.sidedness.value_or(spec.sidedness), options, us.size());
}

TestResult permutation_pvalue(const PseudoSample& pseudo, const StatisticSpec& spec,
                              const PermutationOptions& options) {
  TestResult r = permutation_pvalue(pseudo.u, pseudo.v, spec, options);
  r.config = pseudo.config;
  return r;
}

}  // namespace pcit

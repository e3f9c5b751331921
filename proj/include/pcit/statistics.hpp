#pragma once

// Association measures of the form theta = E s(Y_1..Y_r) t(Z_1..Z_r),
// estimated by V-statistics
//
//   theta_hat = n^-r * sum over all n^r index tuples of s(u_i1..u_ir) t(v_i1..v_ir).
//
// v_statistic_bruteforce() enumerates that sum literally and is the
// correctness authority; the named statistics use exact counting identities on
// the rank lattice (kendall, hoeffding_delta, tau_star) or pairwise-distance
// sums (kappa) and must agree with it to rounding.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace pcit {

class Sample;
class EstimatorConfig;

enum class StatisticKind { pearson, kendall, hoeffding_delta, kappa, tau_star, custom };
enum class Sidedness { two_sided, upper };
enum class Estimator { v_statistic, u_statistic };

/// CLI-facing names: pearson, kendall, hoeffding, kappa, taustar, custom.
std::string to_string(StatisticKind kind);
std::string to_string(Sidedness sidedness);
std::string to_string(Estimator estimator);

/// Accepts the CLI names plus hoeffding_delta / tau_star. Unknown names raise
/// invalid-argument listing the valid ones.
StatisticKind parse_statistic_kind(const std::string& name);
Sidedness parse_sidedness(const std::string& name);
Estimator parse_estimator(const std::string& name);

const std::vector<StatisticKind>& builtin_statistic_kinds();

using TupleKernel = std::function<double(std::span<const double>)>;

struct StatisticSpec {
  StatisticKind kind = StatisticKind::pearson;
  std::size_t degree = 2;
  Sidedness sidedness = Sidedness::two_sided;
  Estimator estimator = Estimator::v_statistic;
  TupleKernel s_kernel;  // custom only
  TupleKernel t_kernel;  // custom only

  /// Built-in statistic with its degree and default sidedness.
  static StatisticSpec of(StatisticKind kind, Estimator estimator = Estimator::v_statistic);
  /// User kernels, evaluated by enumeration only.
  static StatisticSpec custom(TupleKernel s, TupleKernel t, std::size_t degree,
                              Sidedness sidedness = Sidedness::two_sided);

  std::string name() const { return to_string(kind); }
};

struct StatisticValue {
  double value = 0.0;
  StatisticKind kind = StatisticKind::pearson;
  std::size_t n = 0;
};

// Tuple kernels of the built-in measures.
double sign_difference_kernel(std::span<const double> z);  // sign(z1 - z2)
double covariance_kernel(std::span<const double> z);       // (z1 - z2) / sqrt(2)
double hoeffding_kernel(std::span<const double> z);        // phi(z1,z2,z3) phi(z1,z4,z5) / 2
double distance_kernel(std::span<const double> z);         // a(z1..z4) / 2
double sign_distance_kernel(std::span<const double> z);    // sign a(z1..z4)

/// phi(z1, z2, z3) = I(z1 >= z2) - I(z1 >= z3).
double hoeffding_phi(double z1, double z2, double z3) noexcept;
/// a(z1..z4) = |z1 - z2| + |z3 - z4| - |z1 - z3| - |z2 - z4|.
double distance_combination(double z1, double z2, double z3, double z4) noexcept;

struct KindKernels {
  TupleKernel s;
  TupleKernel t;
  std::size_t degree;
};

/// Kernels whose V-statistic is the named measure (kendall's tau_a is that
/// V-statistic times n / (n - 1); pearson is a ratio of covariance V-statistics).
KindKernels reference_kernels(StatisticKind kind);

inline constexpr std::uint64_t kDefaultEnumerationBudget = 100'000'000;

double v_statistic_bruteforce(const TupleKernel& s, const TupleKernel& t, std::size_t degree,
                              std::span<const double> us, std::span<const double> vs,
                              std::uint64_t budget = kDefaultEnumerationBudget);

/// Average over the n!/(n-r)! index tuples with distinct entries.
double u_statistic_bruteforce(const TupleKernel& s, const TupleKernel& t, std::size_t degree,
                              std::span<const double> us, std::span<const double> vs,
                              std::uint64_t budget = kDefaultEnumerationBudget);

/// Value of `kind` computed only through enumeration of its defining kernels.
double reference_statistic(StatisticKind kind, std::span<const double> us,
                           std::span<const double> vs,
                           std::uint64_t budget = kDefaultEnumerationBudget);

StatisticValue pearson_r(std::span<const double> us, std::span<const double> vs);
StatisticValue kendall_tau(std::span<const double> us, std::span<const double> vs);
StatisticValue hoeffding_delta(std::span<const double> us, std::span<const double> vs);
StatisticValue kappa_stat(std::span<const double> us, std::span<const double> vs);
StatisticValue tau_star(std::span<const double> us, std::span<const double> vs);

StatisticValue evaluate(const StatisticSpec& spec, std::span<const double> us,
                        std::span<const double> vs);

/// Pearson correlation of Nadaraya-Watson regression residuals
/// Y - g(X), Z - h(X), using the kernel and bandwidths of `config`.
StatisticValue partial_correlation_baseline(const Sample& sample, const EstimatorConfig& config);

// A statistic prepared for repeated evaluation on (u_i, v_perm[i]). Anything
// that depends on u alone, or on the multiset of v values, is precomputed;
// evaluate() allocates its own scratch and is safe to call concurrently.
class PairedStatistic {
 public:
  virtual ~PairedStatistic() = default;

  std::size_t size() const noexcept { return n_; }
  virtual double evaluate(std::span<const std::uint32_t> perm) const = 0;
  /// Value on the unpermuted pairs.
  double observed() const;

 protected:
  explicit PairedStatistic(std::size_t n) : n_(n) {}

 private:
  std::size_t n_;
};

std::unique_ptr<PairedStatistic> make_paired_statistic(const StatisticSpec& spec,
                                                       std::span<const double> us,
                                                       std::span<const double> vs);

}  // namespace pcit

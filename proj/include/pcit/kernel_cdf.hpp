#pragma once

// Nadaraya-Watson estimation of conditional distribution functions
// F(y | x) = sum_i K(|x - x_i| / h) I(y_i <= y) / sum_i K(|x - x_i| / h).

#include <cstddef>
#include <optional>
#include <span>
#include <string>

namespace pcit {

enum class KernelShape { gaussian };

std::string to_string(KernelShape shape);
KernelShape parse_kernel_shape(const std::string& name);

/// Standard normal density. Throws invalid-argument on non-finite input.
double gaussian_kernel(double u);

/// Symmetric, nonnegative smoothing kernel evaluated at a scaled distance.
class Kernel {
 public:
  constexpr Kernel() = default;
  constexpr explicit Kernel(KernelShape shape) : shape_(shape) {}

  static constexpr Kernel gaussian() { return Kernel(KernelShape::gaussian); }

  KernelShape shape() const noexcept { return shape_; }
  double operator()(double u) const { return gaussian_kernel(u); }

  friend bool operator==(const Kernel&, const Kernel&) = default;

 private:
  KernelShape shape_ = KernelShape::gaussian;
};

/// Positive, finite smoothing scale in the units of X.
class Bandwidth {
 public:
  explicit Bandwidth(double value);

  double value() const noexcept { return value_; }

  friend bool operator==(const Bandwidth&, const Bandwidth&) = default;

 private:
  double value_;
};

/// 1.06 * sd(xs) * n^(-1/5), sd with the n-1 divisor.
Bandwidth silverman_bandwidth(std::span<const double> xs);

/// 1.75 * sqrt(lambda / n), the rule used for the integrated-Wiener model.
Bandwidth sim_bandwidth(double lambda, std::size_t n);

enum class BandwidthRule { explicit_value, silverman, simulation };

std::string to_string(BandwidthRule rule);

// How the two conditional CDF estimators are built. Derived bandwidths are
// only reachable through the silverman()/simulation() factories, so a config
// whose rule is not explicit_value always carries the rule's own values.
class EstimatorConfig {
 public:
  static EstimatorConfig with_bandwidth(double h, Kernel kernel = Kernel::gaussian());
  static EstimatorConfig with_bandwidths(double h_y, double h_z,
                                         Kernel kernel = Kernel::gaussian());
  static EstimatorConfig silverman(std::span<const double> xs,
                                   Kernel kernel = Kernel::gaussian());
  static EstimatorConfig simulation(double lambda, std::size_t n,
                                    Kernel kernel = Kernel::gaussian());

  // Off by default: drop observation i from both sums when estimating at
  // (X_i, Y_i). Only used for sensitivity analysis.
  EstimatorConfig& leave_one_out(bool enabled) noexcept {
    leave_one_out_ = enabled;
    return *this;
  }

  const Kernel& kernel() const noexcept { return kernel_; }
  Bandwidth bandwidth_y() const noexcept { return bandwidth_y_; }
  Bandwidth bandwidth_z() const noexcept { return bandwidth_z_; }
  BandwidthRule rule() const noexcept { return rule_; }
  std::optional<double> lambda() const noexcept { return lambda_; }
  bool leave_one_out() const noexcept { return leave_one_out_; }

  friend bool operator==(const EstimatorConfig&, const EstimatorConfig&) = default;

 private:
  EstimatorConfig(Kernel kernel, Bandwidth h_y, Bandwidth h_z, BandwidthRule rule)
      : kernel_(kernel), bandwidth_y_(h_y), bandwidth_z_(h_z), rule_(rule) {}

  Kernel kernel_;
  Bandwidth bandwidth_y_;
  Bandwidth bandwidth_z_;
  BandwidthRule rule_;
  std::optional<double> lambda_;
  bool leave_one_out_ = false;
};

/// Denominators below this are reported as degenerate-weights.
inline constexpr double kMinWeightSum = 1e-300;

/// Nadaraya-Watson estimate of F(y | x) from the pairs (xs[i], ys[i]).
/// `exclude`, when set, drops that observation from both sums.
double nw_conditional_cdf(std::span<const double> xs, std::span<const double> ys,
                          const Kernel& kernel, Bandwidth h, double x, double y,
                          std::optional<std::size_t> exclude = std::nullopt);

/// Nadaraya-Watson regression estimate of E[Y | X = x].
double nw_regression(std::span<const double> xs, std::span<const double> ys,
                     const Kernel& kernel, Bandwidth h, double x,
                     std::optional<std::size_t> exclude = std::nullopt);

}  // namespace pcit

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pcit/kernel_cdf.hpp"

namespace pcit {

struct Observation {
  double x;
  double y;
  double z;

  friend bool operator==(const Observation&, const Observation&) = default;
};

// n >= 1 finite (x, y, z) triples, stored column-wise.
class Sample {
 public:
  explicit Sample(std::span<const Observation> rows);
  Sample(std::vector<double> x, std::vector<double> y, std::vector<double> z);

  std::size_t size() const noexcept { return x_.size(); }
  Observation row(std::size_t i) const { return {x_.at(i), y_.at(i), z_.at(i)}; }

  std::span<const double> xs() const noexcept { return x_; }
  std::span<const double> ys() const noexcept { return y_; }
  std::span<const double> zs() const noexcept { return z_; }

  friend bool operator==(const Sample&, const Sample&) = default;

 private:
  void validate() const;

  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> z_;
};

// Pseudo-observations (u_i, v_i) = (F(Y_i | X_i), F(Z_i | X_i)), in the row
// order of the source sample. In-sample estimates lie in (0, 1]; the
// leave-one-out variant may produce 0.
struct PseudoSample {
  std::vector<double> u;
  std::vector<double> v;
  EstimatorConfig config;

  std::size_t size() const noexcept { return u.size(); }
};

PseudoSample partial_copula_transform(const Sample& sample, const EstimatorConfig& config);

/// Kolmogorov-Smirnov distance between the empirical CDF of `values` and
/// Uniform(0, 1).
double uniformity_diagnostic(std::span<const double> values);

}  // namespace pcit

#include "pcit/transform.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pcit/error.hpp"

namespace pcit {

Sample::Sample(std::span<const Observation> rows) {
  x_.reserve(rows.size());
  y_.reserve(rows.size());
  z_.reserve(rows.size());
  for (const auto& r : rows) {
    x_.push_back(r.x);
    y_.push_back(r.y);
    z_.push_back(r.z);
  }
  validate();
}

Sample::Sample(std::vector<double> x, std::vector<double> y, std::vector<double> z)
    : x_(std::move(x)), y_(std::move(y)), z_(std::move(z)) {
  validate();
}

void Sample::validate() const {
  if (x_.empty()) fail(ErrorCode::invalid_argument, "sample is empty");
  if (x_.size() != y_.size() || x_.size() != z_.size()) {
    fail(ErrorCode::invalid_argument, "sample columns differ in length");
  }
  for (std::size_t i = 0; i < x_.size(); ++i) {
    if (!std::isfinite(x_[i]) || !std::isfinite(y_[i]) || !std::isfinite(z_[i])) {
      fail(ErrorCode::invalid_argument, "row " + std::to_string(i) + " is not finite");
    }
  }
}

namespace {

// Evaluates both conditional CDFs at every data point. When the two
// bandwidths coincide the kernel row is shared between Y and Z.
void transform_rows(const Sample& sample, const EstimatorConfig& config,
                    std::vector<double>& u, std::vector<double>& v) {
  const std::size_t n = sample.size();
  const auto xs = sample.xs();
  const auto ys = sample.ys();
  const auto zs = sample.zs();
  const double hy = config.bandwidth_y().value();
  const double hz = config.bandwidth_z().value();
  const bool shared = hy == hz;
  const bool loo = config.leave_one_out();
  const Kernel& kernel = config.kernel();

  for (std::size_t i = 0; i < n; ++i) {
    double den_y = 0.0, num_y = 0.0, den_z = 0.0, num_z = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (loo && j == i) continue;
      const double dx = std::abs(xs[i] - xs[j]);
      const double wy = kernel(dx / hy);
      const double wz = shared ? wy : kernel(dx / hz);
      den_y += wy;
      den_z += wz;
      if (ys[j] <= ys[i]) num_y += wy;
      if (zs[j] <= zs[i]) num_z += wz;
    }
    if (!(den_y >= kMinWeightSum) || !(den_z >= kMinWeightSum)) {
      fail(ErrorCode::degenerate_weights,
           "kernel weights vanish at row " + std::to_string(i) + " (x = " +
               std::to_string(xs[i]) + ")");
    }
    u[i] = num_y / den_y;
    v[i] = num_z / den_z;
  }
}

}  // namespace

PseudoSample partial_copula_transform(const Sample& sample, const EstimatorConfig& config) {
  PseudoSample out{std::vector<double>(sample.size()), std::vector<double>(sample.size()),
                   config};
  transform_rows(sample, config, out.u, out.v);
  return out;
}

double uniformity_diagnostic(std::span<const double> values) {
  if (values.empty()) fail(ErrorCode::invalid_argument, "no values to compare");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = std::clamp(sorted[i], 0.0, 1.0);
    d = std::max({d, static_cast<double>(i + 1) / n - cdf, cdf - static_cast<double>(i) / n});
  }
  return d;
}

}  // namespace pcit

#include "pcit/kernel_cdf.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "pcit/error.hpp"

namespace pcit {

namespace {

void require_finite(std::span<const double> values, const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      fail(ErrorCode::invalid_argument,
           std::string(what) + "[" + std::to_string(i) + "] is not finite");
    }
  }
}

void check_inputs(std::span<const double> xs, std::span<const double> ys, double x,
                  double y) {
  if (xs.empty()) fail(ErrorCode::invalid_argument, "no observations");
  if (xs.size() != ys.size()) {
    fail(ErrorCode::invalid_argument, "x and y columns differ in length");
  }
  if (!std::isfinite(x) || !std::isfinite(y)) {
    fail(ErrorCode::invalid_argument, "query point is not finite");
  }
  require_finite(xs, "x");
  require_finite(ys, "y");
}

}  // namespace

std::string to_string(KernelShape shape) {
  switch (shape) {
    case KernelShape::gaussian: return "gaussian";
  }
  return "unknown";
}

KernelShape parse_kernel_shape(const std::string& name) {
  if (name == "gaussian") return KernelShape::gaussian;
  fail(ErrorCode::invalid_argument, "unknown kernel '" + name + "' (valid: gaussian)");
}

double gaussian_kernel(double u) {
  if (!std::isfinite(u)) fail(ErrorCode::invalid_argument, "kernel argument is not finite");
  return std::exp(-0.5 * u * u) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
}

Bandwidth::Bandwidth(double value) : value_(value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    fail(ErrorCode::invalid_argument, "bandwidth must be positive and finite");
  }
}

Bandwidth silverman_bandwidth(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n < 2) fail(ErrorCode::invalid_argument, "Silverman's rule needs at least 2 values");
  require_finite(xs, "x");
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0)) fail(ErrorCode::degenerate_spread, "all x values are equal");
  return Bandwidth(1.06 * sd * std::pow(static_cast<double>(n), -0.2));
}

Bandwidth sim_bandwidth(double lambda, std::size_t n) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    fail(ErrorCode::invalid_argument, "noise-to-signal ratio must be positive");
  }
  if (n < 1) fail(ErrorCode::invalid_argument, "sample size must be positive");
  return Bandwidth(1.75 * std::sqrt(lambda / static_cast<double>(n)));
}

std::string to_string(BandwidthRule rule) {
  switch (rule) {
    case BandwidthRule::explicit_value: return "explicit";
    case BandwidthRule::silverman: return "silverman";
    case BandwidthRule::simulation: return "simulation";
  }
  return "unknown";
}

EstimatorConfig EstimatorConfig::with_bandwidth(double h, Kernel kernel) {
  return with_bandwidths(h, h, kernel);
}

EstimatorConfig EstimatorConfig::with_bandwidths(double h_y, double h_z, Kernel kernel) {
  return EstimatorConfig(kernel, Bandwidth(h_y), Bandwidth(h_z),
                         BandwidthRule::explicit_value);
}

EstimatorConfig EstimatorConfig::silverman(std::span<const double> xs, Kernel kernel) {
  const Bandwidth h = silverman_bandwidth(xs);
  return EstimatorConfig(kernel, h, h, BandwidthRule::silverman);
}

EstimatorConfig EstimatorConfig::simulation(double lambda, std::size_t n, Kernel kernel) {
  const Bandwidth h = sim_bandwidth(lambda, n);
  EstimatorConfig config(kernel, h, h, BandwidthRule::simulation);
  config.lambda_ = lambda;
  return config;
}

double nw_conditional_cdf(std::span<const double> xs, std::span<const double> ys,
                          const Kernel& kernel, Bandwidth h, double x, double y,
                          std::optional<std::size_t> exclude) {
  check_inputs(xs, ys, x, y);
  double numerator = 0.0;
  double denominator = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (exclude && *exclude == i) continue;
    const double w = kernel(std::abs(x - xs[i]) / h.value());
    denominator += w;
    if (ys[i] <= y) numerator += w;
  }
  if (!(denominator >= kMinWeightSum)) {
    fail(ErrorCode::degenerate_weights,
         "kernel weights vanish at x = " + std::to_string(x) + " for bandwidth " +
             std::to_string(h.value()));
  }
  return numerator / denominator;
}

double nw_regression(std::span<const double> xs, std::span<const double> ys,
                     const Kernel& kernel, Bandwidth h, double x,
                     std::optional<std::size_t> exclude) {
  check_inputs(xs, ys, x, 0.0);
  double numerator = 0.0;
  double denominator = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (exclude && *exclude == i) continue;
    const double w = kernel(std::abs(x - xs[i]) / h.value());
    denominator += w;
    numerator += w * ys[i];
  }
  if (!(denominator >= kMinWeightSum)) {
    fail(ErrorCode::degenerate_weights,
         "kernel weights vanish at x = " + std::to_string(x));
  }
  return numerator / denominator;
}

}  // namespace pcit

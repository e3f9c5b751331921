#include "pcit/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "pcit/error.hpp"
#include "pcit/random.hpp"
#include "pcit/rank_grid.hpp"

namespace pcit {

namespace {

// Stream tags within one replication seed.
enum StreamTag : std::uint64_t {
  kSignalG = 1,
  kSignalH = 2,
  kDesign = 3,
  kNoise = 4,
  kConditionalPermutation = 5,
  kUnconditionalPermutation = 6,
};

void check_options(const StudyOptions& options) {
  if (options.replications < 1) fail(ErrorCode::invalid_argument, "replications must be >= 1");
  if (options.resamples < 1) fail(ErrorCode::invalid_argument, "resamples must be >= 1");
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) {
    fail(ErrorCode::invalid_argument, "alpha must lie in (0, 1)");
  }
}

std::vector<double> normalized_ranks(std::span<const double> xs) {
  const DenseRanks r = dense_ranks(xs);
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out[i] = static_cast<double>(r.rank[i]) / static_cast<double>(r.levels);
  }
  return out;
}

struct ReplicationOutcome {
  std::vector<double> conditional_p;  // one per bandwidth
  double unconditional_p = 1.0;
};

ReplicationOutcome replicate(const SimConfig& cfg, std::span<const double> bandwidths,
                             const StudyOptions& options, const SignalPath* fixed_g,
                             const SignalPath* fixed_h) {
  const SimulatedData data =
      fixed_g ? gen_dataset(cfg, *fixed_g, *fixed_h) : gen_dataset(cfg);
  const StatisticSpec spec = StatisticSpec::of(options.statistic);

  PermutationOptions perm;
  perm.resamples = options.resamples;
  perm.sidedness = options.sidedness;
  perm.execution = Execution::serial;

  ReplicationOutcome out;
  for (double h : bandwidths) {
    const PseudoSample pseudo =
        partial_copula_transform(data.sample, EstimatorConfig::with_bandwidth(h));
    perm.seed = derive_seed(cfg.seed, kConditionalPermutation);
    out.conditional_p.push_back(permutation_pvalue(pseudo, spec, perm).p_value);
  }
  perm.seed = derive_seed(cfg.seed, kUnconditionalPermutation);
  if (options.baseline == UnconditionalBaseline::true_errors) {
    const CopulaPairs exact = true_copula_transform(data);
    out.unconditional_p = permutation_pvalue(exact.u, exact.v, spec, perm).p_value;
  } else {
    out.unconditional_p = permutation_pvalue(normalized_ranks(data.sample.ys()),
                                             normalized_ranks(data.sample.zs()), spec, perm)
                              .p_value;
  }
  return out;
}

std::vector<ReplicationOutcome> replicate_all(const SimConfig& base,
                                              std::span<const double> bandwidths,
                                              const StudyOptions& options) {
  std::optional<SignalPath> g, h;
  if (!options.redraw_functions) {
    g = integrated_wiener(base.sigma0, base.grid_m, derive_seed(base.seed, kSignalG));
    h = integrated_wiener(base.sigma0, base.grid_m, derive_seed(base.seed, kSignalH));
  }
  std::vector<ReplicationOutcome> outcomes(options.replications);
  const auto total = static_cast<std::int64_t>(options.replications);
  auto body = [&](std::int64_t r) {
    SimConfig cfg = base;
    cfg.seed = derive_seed(base.seed, static_cast<std::uint64_t>(r));
    outcomes[static_cast<std::size_t>(r)] =
        replicate(cfg, bandwidths, options, g ? &*g : nullptr, h ? &*h : nullptr);
  };
  if (options.execution == Execution::serial) {
    for (std::int64_t r = 0; r < total; ++r) body(r);
    return outcomes;
  }
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t r = 0; r < total; ++r) {
    try {
      body(r);
    } catch (...) {
#pragma omp critical(pcit_simulation_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return outcomes;
}

}  // namespace

std::string to_string(UnconditionalBaseline baseline) {
  return baseline == UnconditionalBaseline::raw_ranks ? "raw" : "errors";
}

UnconditionalBaseline parse_unconditional_baseline(const std::string& name) {
  if (name == "raw") return UnconditionalBaseline::raw_ranks;
  if (name == "errors") return UnconditionalBaseline::true_errors;
  fail(ErrorCode::invalid_argument, "unknown baseline '" + name + "' (valid: raw, errors)");
}

void SimConfig::validate() const {
  if (n < 2) fail(ErrorCode::invalid_argument, "n must be >= 2");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    fail(ErrorCode::invalid_argument, "lambda must be positive");
  }
  if (!(std::abs(rho) <= 1.0)) fail(ErrorCode::invalid_argument, "|rho| must be <= 1");
  if (!(sigma0 >= 0.0) || !std::isfinite(sigma0)) {
    fail(ErrorCode::invalid_argument, "sigma0 must be nonnegative");
  }
  if (grid_m < 2) fail(ErrorCode::invalid_argument, "grid_m must be >= 2");
}

SignalPath::SignalPath(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) fail(ErrorCode::invalid_argument, "a path needs >= 2 grid points");
}

double SignalPath::operator()(double x) const {
  const double pos = std::clamp(x, 0.0, 1.0) * static_cast<double>(values_.size() - 1);
  const auto k = std::min(static_cast<std::size_t>(pos), values_.size() - 2);
  const double frac = pos - static_cast<double>(k);
  return values_[k] + frac * (values_[k + 1] - values_[k]);
}

SignalPath integrated_wiener(double sigma0, std::size_t grid_m, std::mt19937_64& rng) {
  if (!(sigma0 >= 0.0)) fail(ErrorCode::invalid_argument, "sigma0 must be nonnegative");
  if (grid_m < 2) fail(ErrorCode::invalid_argument, "grid_m must be >= 2");
  const double dx = 1.0 / static_cast<double>(grid_m - 1);
  std::normal_distribution<double> step(0.0, std::sqrt(dx));
  std::vector<double> g(grid_m, 0.0);
  double w = 0.0;
  double integral = 0.0;
  for (std::size_t k = 1; k < grid_m; ++k) {
    const double w_next = w + step(rng);
    integral += 0.5 * (w + w_next) * dx;
    g[k] = sigma0 * integral;
    w = w_next;
  }
  return SignalPath(std::move(g));
}

SignalPath integrated_wiener(double sigma0, std::size_t grid_m, std::uint64_t seed) {
  auto rng = make_stream(seed, 0);
  return integrated_wiener(sigma0, grid_m, rng);
}

SimulatedData gen_dataset(const SimConfig& cfg) {
  cfg.validate();
  return gen_dataset(cfg,
                     integrated_wiener(cfg.sigma0, cfg.grid_m, derive_seed(cfg.seed, kSignalG)),
                     integrated_wiener(cfg.sigma0, cfg.grid_m, derive_seed(cfg.seed, kSignalH)));
}

SimulatedData gen_dataset(const SimConfig& cfg, const SignalPath& g, const SignalPath& h) {
  cfg.validate();
  auto design = make_stream(cfg.seed, kDesign);
  auto noise = make_stream(cfg.seed, kNoise);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sd = cfg.lambda * cfg.sigma0;
  const double cross = std::sqrt(std::max(0.0, 1.0 - cfg.rho * cfg.rho));
  std::vector<double> x(cfg.n), y(cfg.n), z(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    x[i] = unif(design);
    const double e1 = normal(noise);
    const double e2 = normal(noise);
    y[i] = g(x[i]) + sd * e1;
    z[i] = h(x[i]) + sd * (cfg.rho * e1 + cross * e2);
  }
  return SimulatedData{Sample(std::move(x), std::move(y), std::move(z)), g, h, sd};
}

CopulaPairs true_copula_transform(const SimulatedData& data) {
  if (!(data.noise_sd > 0.0)) {
    fail(ErrorCode::degenerate_variance, "noise sd is zero; the true transform is undefined");
  }
  const auto xs = data.sample.xs();
  const auto ys = data.sample.ys();
  const auto zs = data.sample.zs();
  CopulaPairs out{std::vector<double>(xs.size()), std::vector<double>(xs.size())};
  const double scale = 1.0 / (data.noise_sd * std::sqrt(2.0));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out.u[i] = 0.5 * std::erfc(-(ys[i] - data.g(xs[i])) * scale);
    out.v[i] = 0.5 * std::erfc(-(zs[i] - data.h(xs[i])) * scale);
  }
  return out;
}

RejectionTable run_power_study(const SimConfig& base, std::span<const double> rho_grid,
                               const StudyOptions& options) {
  base.validate();
  check_options(options);
  if (rho_grid.empty()) fail(ErrorCode::invalid_argument, "rho grid is empty");
  const double h = sim_bandwidth(base.lambda, base.n).value();
  const double bandwidths[] = {h};
  RejectionTable table;
  for (double rho : rho_grid) {
    SimConfig cfg = base;
    cfg.rho = rho;
    cfg.validate();
    const auto outcomes = replicate_all(cfg, bandwidths, options);
    std::uint64_t cond = 0, uncond = 0;
    for (const auto& o : outcomes) {
      cond += o.conditional_p[0] <= options.alpha;
      uncond += o.unconditional_p <= options.alpha;
    }
    const auto reps = static_cast<double>(options.replications);
    table.rows.push_back({rho, base.n, base.lambda, h, options.statistic,
                          static_cast<double>(cond) / reps, static_cast<double>(uncond) / reps,
                          options.replications, options.resamples});
  }
  return table;
}

RejectionTable run_bandwidth_robustness(const SimConfig& base,
                                        std::span<const double> bandwidth_grid,
                                        const StudyOptions& options) {
  SimConfig cfg = base;
  cfg.rho = 0.0;
  cfg.validate();
  check_options(options);
  if (bandwidth_grid.empty()) fail(ErrorCode::invalid_argument, "bandwidth grid is empty");
  for (double h : bandwidth_grid) (void)Bandwidth(h);
  const auto outcomes = replicate_all(cfg, bandwidth_grid, options);
  std::uint64_t uncond = 0;
  for (const auto& o : outcomes) uncond += o.unconditional_p <= options.alpha;
  const auto reps = static_cast<double>(options.replications);
  RejectionTable table;
  for (std::size_t k = 0; k < bandwidth_grid.size(); ++k) {
    std::uint64_t cond = 0;
    for (const auto& o : outcomes) cond += o.conditional_p[k] <= options.alpha;
    table.rows.push_back({0.0, cfg.n, cfg.lambda, bandwidth_grid[k], options.statistic,
                          static_cast<double>(cond) / reps, static_cast<double>(uncond) / reps,
                          options.replications, options.resamples});
  }
  return table;
}

}  // namespace pcit

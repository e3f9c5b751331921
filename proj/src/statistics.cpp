#include "pcit/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "pcit/error.hpp"
#include "pcit/kernel_cdf.hpp"
#include "pcit/rank_grid.hpp"
#include "pcit/transform.hpp"

namespace pcit {

namespace {

__extension__ using wide_int = __int128;


double sign_of(double v) noexcept { return static_cast<double>((v > 0.0) - (v < 0.0)); }

void check_pairs(std::span<const double> us, std::span<const double> vs, std::size_t min_n,
                 const char* what) {
  if (us.size() != vs.size()) {
    fail(ErrorCode::invalid_argument, std::string(what) + ": u and v differ in length");
  }
  if (us.size() < min_n) {
    fail(ErrorCode::invalid_argument,
         std::string(what) + " needs n >= " + std::to_string(min_n));
  }
  for (std::size_t i = 0; i < us.size(); ++i) {
    if (!std::isfinite(us[i]) || !std::isfinite(vs[i])) {
      fail(ErrorCode::invalid_argument,
           std::string(what) + ": pair " + std::to_string(i) + " is not finite");
    }
  }
}

bool is_constant(std::span<const double> xs) {
  return std::adjacent_find(xs.begin(), xs.end(), std::not_equal_to<>()) == xs.end();
}

std::uint64_t checked_power(std::size_t n, std::size_t r, std::uint64_t budget) {
  std::uint64_t total = 1;
  for (std::size_t k = 0; k < r; ++k) {
    if (n != 0 && total > budget / n) {
      fail(ErrorCode::budget_exceeded,
           std::to_string(n) + "^" + std::to_string(r) +
               " index tuples exceed the enumeration budget of " + std::to_string(budget));
    }
    total *= n;
  }
  return total;
}

double enumerate(const TupleKernel& s, const TupleKernel& t, std::size_t r,
                 std::span<const double> us, std::span<const double> vs, std::uint64_t budget,
                 bool distinct) {
  if (!s || !t) fail(ErrorCode::invalid_argument, "kernel functions must be set");
  if (r == 0) fail(ErrorCode::invalid_argument, "degree must be positive");
  check_pairs(us, vs, distinct ? std::max<std::size_t>(r, 1) : 1, "enumeration");
  const std::size_t n = us.size();
  checked_power(n, r, budget);

  std::vector<std::size_t> idx(r, 0);
  std::vector<double> ubuf(r, us[0]);
  std::vector<double> vbuf(r, vs[0]);
  double total = 0.0;
  std::uint64_t used = 0;
  while (true) {
    bool keep = true;
    if (distinct) {
      for (std::size_t a = 0; a < r && keep; ++a)
        for (std::size_t b = a + 1; b < r && keep; ++b) keep = idx[a] != idx[b];
    }
    if (keep) {
      total += s(ubuf) * t(vbuf);
      ++used;
    }
    std::size_t pos = r;
    while (pos > 0) {
      --pos;
      if (++idx[pos] < n) {
        ubuf[pos] = us[idx[pos]];
        vbuf[pos] = vs[idx[pos]];
        break;
      }
      idx[pos] = 0;
      ubuf[pos] = us[0];
      vbuf[pos] = vs[0];
      if (pos == 0) return total / static_cast<double>(used);
    }
  }
}

std::vector<std::uint32_t> identity(std::size_t n) {
  std::vector<std::uint32_t> p(n);
  std::iota(p.begin(), p.end(), 0u);
  return p;
}

class PearsonPaired final : public PairedStatistic {
 public:
  PearsonPaired(std::span<const double> us, std::span<const double> vs)
      : PairedStatistic(us.size()), cu_(center(us)), cv_(center(vs)) {
    double suu = 0.0, svv = 0.0;
    for (std::size_t i = 0; i < cu_.size(); ++i) {
      suu += cu_[i] * cu_[i];
      svv += cv_[i] * cv_[i];
    }
    scale_ = 1.0 / std::sqrt(suu * svv);
  }

  double evaluate(std::span<const std::uint32_t> perm) const override {
    double suv = 0.0;
    for (std::size_t i = 0; i < cu_.size(); ++i) suv += cu_[i] * cv_[perm[i]];
    return suv * scale_;
  }

 private:
  static std::vector<double> center(std::span<const double> xs) {
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    std::vector<double> out(xs.size());
    std::transform(xs.begin(), xs.end(), out.begin(), [&](double x) { return x - mean; });
    return out;
  }

  std::vector<double> cu_;
  std::vector<double> cv_;
  double scale_ = 0.0;
};

class KendallPaired final : public PairedStatistic {
 public:
  KendallPaired(std::span<const double> us, std::span<const double> vs)
      : PairedStatistic(us.size()), v_(vs.begin(), vs.end()), sign_u_(us.size() * us.size()) {
    const std::size_t n = us.size();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        sign_u_[i * n + j] = static_cast<std::int8_t>(sign_of(us[i] - us[j]));
  }

  double evaluate(std::span<const std::uint32_t> perm) const override {
    const std::size_t n = size();
    std::int64_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double vi = v_[perm[i]];
      const std::int8_t* row = &sign_u_[i * n];
      for (std::size_t j = i + 1; j < n; ++j) {
        const double d = vi - v_[perm[j]];
        total += row[j] * ((d > 0.0) - (d < 0.0));
      }
    }
    return 2.0 * static_cast<double>(total) / (static_cast<double>(n) * static_cast<double>(n - 1));
  }

 private:
  std::vector<double> v_;
  std::vector<std::int8_t> sign_u_;
};

// n^-5 sum_i (n C_i - A_i B_i)^2 with A_i = #{u_j <= u_i}, B_i = #{v_j <= v_i},
// C_i = #{u_j <= u_i, v_j <= v_i}.
class HoeffdingPaired final : public PairedStatistic {
 public:
  HoeffdingPaired(std::span<const double> us, std::span<const double> vs)
      : PairedStatistic(us.size()) {
    auto ru = dense_ranks(us);
    auto rv = dense_ranks(vs);
    ru_ = std::move(ru.rank);
    rv_ = std::move(rv.rank);
    mu_ = ru.levels;
    mv_ = rv.levels;
    cum_u_ = cumulative_counts(ru_, mu_);
    cum_v_ = cumulative_counts(rv_, mv_);
  }

  double evaluate(std::span<const std::uint32_t> perm) const override {
    CountGrid grid;
    grid.build(ru_, mu_, rv_, mv_, perm);
    const auto n = static_cast<std::int64_t>(size());
    wide_int total = 0;
    for (std::size_t i = 0; i < size(); ++i) {
      const std::uint32_t b = rv_[perm[i]];
      const std::int64_t d = n * grid.le_le(ru_[i], b) - cum_u_[ru_[i]] * cum_v_[b];
      total += static_cast<wide_int>(d) * d;
    }
    const long double nn = static_cast<long double>(n);
    return static_cast<double>(static_cast<long double>(total) / (nn * nn * nn * nn * nn));
  }

 private:
  static std::vector<std::int64_t> cumulative_counts(const std::vector<std::uint32_t>& r,
                                                     std::uint32_t levels) {
    std::vector<std::int64_t> c(levels + 1, 0);
    for (auto x : r) ++c[x];
    std::partial_sum(c.begin(), c.end(), c.begin());
    return c;
  }

  std::vector<std::uint32_t> ru_, rv_;
  std::uint32_t mu_ = 0, mv_ = 0;
  std::vector<std::int64_t> cum_u_, cum_v_;
};

// S / n^2 + D E / n^4 - 2 R / n^3 with S = sum_ij d_ij e_ij, D = sum d,
// E = sum e, R = sum_i (sum_j d_ij)(sum_j e_ij); d, e absolute differences.
class KappaPaired final : public PairedStatistic {
 public:
  KappaPaired(std::span<const double> us, std::span<const double> vs)
      : PairedStatistic(us.size()), du_(distances(us)), dv_(distances(vs)),
        row_u_(row_sums(du_, us.size())), row_v_(row_sums(dv_, us.size())) {
    const double su = std::accumulate(row_u_.begin(), row_u_.end(), 0.0);
    const double sv = std::accumulate(row_v_.begin(), row_v_.end(), 0.0);
    const double n = static_cast<double>(size());
    product_term_ = su * sv / (n * n * n * n);
  }

  double evaluate(std::span<const std::uint32_t> perm) const override {
    const std::size_t n = size();
    double cross = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double* du = &du_[i * n];
      const double* dv = &dv_[static_cast<std::size_t>(perm[i]) * n];
      double acc = 0.0;
      for (std::size_t j = i + 1; j < n; ++j) acc += du[j] * dv[perm[j]];
      cross += acc;
    }
    double rr = 0.0;
    for (std::size_t i = 0; i < n; ++i) rr += row_u_[i] * row_v_[perm[i]];
    const double nd = static_cast<double>(n);
    return 2.0 * cross / (nd * nd) + product_term_ - 2.0 * rr / (nd * nd * nd);
  }

 private:
  static std::vector<double> distances(std::span<const double> xs) {
    const std::size_t n = xs.size();
    std::vector<double> d(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i * n + j] = std::abs(xs[i] - xs[j]);
    return d;
  }
  static std::vector<double> row_sums(const std::vector<double>& d, std::size_t n) {
    std::vector<double> r(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) r[i] += d[i * n + j];
    return r;
  }

  std::vector<double> du_, dv_;
  std::vector<double> row_u_, row_v_;
  double product_term_ = 0.0;
};

// sign a(z1..z4) = S(13|24) - S(12|34), where S(AB|CD) indicates that the
// pair {z_A, z_B} lies strictly on one side of {z_C, z_D}. Summing over all
// index tuples and relabelling gives
//   n^4 tau* = 4 (LL + LH) - 8 Q
// with LL, LH, Q counts of four-point configurations. Each count is an
// inclusion-exclusion over the levels (s, t) attained by the lower maxima,
// so only orthant counts of the rank lattice are needed.
class TauStarPaired final : public PairedStatistic {
 public:
  TauStarPaired(std::span<const double> us, std::span<const double> vs)
      : PairedStatistic(us.size()) {
    if (us.size() > 50'000) {
      fail(ErrorCode::budget_exceeded, "tau_star counting supports n <= 50000");
    }
    auto ru = dense_ranks(us);
    auto rv = dense_ranks(vs);
    ru_ = std::move(ru.rank);
    rv_ = std::move(rv.rank);
    mu_ = ru.levels;
    mv_ = rv.levels;
  }

  double evaluate(std::span<const std::uint32_t> perm) const override {
    CountGrid g;
    g.build(ru_, mu_, rv_, mv_, perm);
    std::int64_t ll = 0, lh = 0, q = 0;
    for (std::uint32_t s = 1; s <= mu_; ++s) {
      for (std::uint32_t t = 1; t <= mv_; ++t) {
        const std::int64_t n11 = g.le_le(s, t), n01 = g.le_le(s - 1, t);
        const std::int64_t n10 = g.le_le(s, t - 1), n00 = g.le_le(s - 1, t - 1);
        const std::int64_t lg1 = g.le_gt(s, t), lg0 = g.le_gt(s - 1, t);
        const std::int64_t gl1 = g.gt_le(s, t), gl0 = g.gt_le(s, t - 1);
        const std::int64_t gg = g.gt_gt(s, t);
        ll += (n11 * n11 - n01 * n01 - n10 * n10 + n00 * n00) * gg * gg;
        lh += (lg1 * lg1 - lg0 * lg0) * (gl1 * gl1 - gl0 * gl0);
        q += gg * (lg1 * (n11 * gl1 - n10 * gl0) - lg0 * (n01 * gl1 - n00 * gl0));
      }
    }
    const double n = static_cast<double>(size());
    return static_cast<double>(4 * (ll + lh) - 8 * q) / (n * n * n * n);
  }

 private:
  std::vector<std::uint32_t> ru_, rv_;
  std::uint32_t mu_ = 0, mv_ = 0;
};

class EnumeratedPaired final : public PairedStatistic {
 public:
  EnumeratedPaired(KindKernels kernels, bool distinct, std::span<const double> us,
                   std::span<const double> vs)
      : PairedStatistic(us.size()), kernels_(std::move(kernels)), distinct_(distinct),
        u_(us.begin(), us.end()), v_(vs.begin(), vs.end()) {
    // Surface budget and size errors at construction rather than per resample.
    if (distinct_ && u_.size() < kernels_.degree) {
      fail(ErrorCode::invalid_argument, "U-statistic needs n >= degree");
    }
    checked_power(u_.size(), kernels_.degree, kDefaultEnumerationBudget);
  }

  double evaluate(std::span<const std::uint32_t> perm) const override {
    std::vector<double> pv(v_.size());
    for (std::size_t i = 0; i < pv.size(); ++i) pv[i] = v_[perm[i]];
    return enumerate(kernels_.s, kernels_.t, kernels_.degree, u_, pv,
                     kDefaultEnumerationBudget, distinct_);
  }

 private:
  KindKernels kernels_;
  bool distinct_;
  std::vector<double> u_, v_;
};

}  // namespace

std::string to_string(StatisticKind kind) {
  switch (kind) {
    case StatisticKind::pearson: return "pearson";
    case StatisticKind::kendall: return "kendall";
    case StatisticKind::hoeffding_delta: return "hoeffding";
    case StatisticKind::kappa: return "kappa";
    case StatisticKind::tau_star: return "taustar";
    case StatisticKind::custom: return "custom";
  }
  return "unknown";
}

std::string to_string(Sidedness sidedness) {
  return sidedness == Sidedness::two_sided ? "two" : "upper";
}

std::string to_string(Estimator estimator) {
  return estimator == Estimator::v_statistic ? "v" : "u";
}

StatisticKind parse_statistic_kind(const std::string& name) {
  if (name == "pearson") return StatisticKind::pearson;
  if (name == "kendall") return StatisticKind::kendall;
  if (name == "hoeffding" || name == "hoeffding_delta") return StatisticKind::hoeffding_delta;
  if (name == "kappa") return StatisticKind::kappa;
  if (name == "taustar" || name == "tau_star") return StatisticKind::tau_star;
  fail(ErrorCode::invalid_argument,
       "unknown statistic '" + name + "' (valid: pearson, kendall, hoeffding, kappa, taustar)");
}

Sidedness parse_sidedness(const std::string& name) {
  if (name == "two" || name == "two_sided") return Sidedness::two_sided;
  if (name == "upper") return Sidedness::upper;
  fail(ErrorCode::invalid_argument, "unknown sidedness '" + name + "' (valid: two, upper)");
}

Estimator parse_estimator(const std::string& name) {
  if (name == "v") return Estimator::v_statistic;
  if (name == "u") return Estimator::u_statistic;
  fail(ErrorCode::invalid_argument, "unknown estimator '" + name + "' (valid: v, u)");
}

const std::vector<StatisticKind>& builtin_statistic_kinds() {
  static const std::vector<StatisticKind> kinds{
      StatisticKind::pearson, StatisticKind::kendall, StatisticKind::hoeffding_delta,
      StatisticKind::kappa, StatisticKind::tau_star};
  return kinds;
}

StatisticSpec StatisticSpec::of(StatisticKind kind, Estimator estimator) {
  StatisticSpec spec;
  spec.kind = kind;
  spec.estimator = estimator;
  switch (kind) {
    case StatisticKind::pearson:
    case StatisticKind::kendall:
      spec.degree = 2;
      spec.sidedness = Sidedness::two_sided;
      break;
    case StatisticKind::kappa:
    case StatisticKind::tau_star:
      spec.degree = 4;
      spec.sidedness = Sidedness::upper;
      break;
    case StatisticKind::hoeffding_delta:
      spec.degree = 5;
      spec.sidedness = Sidedness::upper;
      break;
    case StatisticKind::custom:
      fail(ErrorCode::invalid_argument, "use StatisticSpec::custom for user kernels");
  }
  return spec;
}

StatisticSpec StatisticSpec::custom(TupleKernel s, TupleKernel t, std::size_t degree,
                                    Sidedness sidedness) {
  if (!s || !t) fail(ErrorCode::invalid_argument, "custom statistic needs both kernels");
  if (degree == 0) fail(ErrorCode::invalid_argument, "degree must be positive");
  StatisticSpec spec;
  spec.kind = StatisticKind::custom;
  spec.degree = degree;
  spec.sidedness = sidedness;
  spec.s_kernel = std::move(s);
  spec.t_kernel = std::move(t);
  return spec;
}

double hoeffding_phi(double z1, double z2, double z3) noexcept {
  return static_cast<double>(z1 >= z2) - static_cast<double>(z1 >= z3);
}

double distance_combination(double z1, double z2, double z3, double z4) noexcept {
  return std::abs(z1 - z2) + std::abs(z3 - z4) - std::abs(z1 - z3) - std::abs(z2 - z4);
}

double sign_difference_kernel(std::span<const double> z) { return sign_of(z[0] - z[1]); }

double covariance_kernel(std::span<const double> z) {
  return (z[0] - z[1]) * (0.5 * std::numbers::sqrt2);
}

double hoeffding_kernel(std::span<const double> z) {
  return 0.5 * hoeffding_phi(z[0], z[1], z[2]) * hoeffding_phi(z[0], z[3], z[4]);
}

double distance_kernel(std::span<const double> z) {
  return 0.5 * distance_combination(z[0], z[1], z[2], z[3]);
}

// sign(a) from order comparisons alone. Agrees with sign(a) in exact
// arithmetic for every weak ordering of four values; the floating-point sum
// can leave a residue of either sign where a is exactly zero.
double sign_distance_kernel(std::span<const double> z) {
  const auto separated = [](double a1, double a2, double b1, double b2) {
    return std::max(a1, a2) < std::min(b1, b2) || std::min(a1, a2) > std::max(b1, b2);
  };
  return static_cast<double>(separated(z[0], z[2], z[1], z[3])) -
         static_cast<double>(separated(z[0], z[1], z[2], z[3]));
}

KindKernels reference_kernels(StatisticKind kind) {
  switch (kind) {
    case StatisticKind::pearson: return {covariance_kernel, covariance_kernel, 2};
    case StatisticKind::kendall: return {sign_difference_kernel, sign_difference_kernel, 2};
    case StatisticKind::hoeffding_delta: return {hoeffding_kernel, hoeffding_kernel, 5};
    case StatisticKind::kappa: return {distance_kernel, distance_kernel, 4};
    case StatisticKind::tau_star: return {sign_distance_kernel, sign_distance_kernel, 4};
    case StatisticKind::custom: break;
  }
  fail(ErrorCode::invalid_argument, "custom statistics carry their own kernels");
}

double v_statistic_bruteforce(const TupleKernel& s, const TupleKernel& t, std::size_t degree,
                              std::span<const double> us, std::span<const double> vs,
                              std::uint64_t budget) {
  return enumerate(s, t, degree, us, vs, budget, false);
}

double u_statistic_bruteforce(const TupleKernel& s, const TupleKernel& t, std::size_t degree,
                              std::span<const double> us, std::span<const double> vs,
                              std::uint64_t budget) {
  return enumerate(s, t, degree, us, vs, budget, true);
}

double reference_statistic(StatisticKind kind, std::span<const double> us,
                           std::span<const double> vs, std::uint64_t budget) {
  const KindKernels k = reference_kernels(kind);
  if (kind == StatisticKind::pearson) {
    const double uv = v_statistic_bruteforce(k.s, k.t, 2, us, vs, budget);
    const double uu = v_statistic_bruteforce(k.s, k.s, 2, us, us, budget);
    const double vv = v_statistic_bruteforce(k.t, k.t, 2, vs, vs, budget);
    return uv / std::sqrt(uu * vv);
  }
  const double v = v_statistic_bruteforce(k.s, k.t, k.degree, us, vs, budget);
  if (kind == StatisticKind::kendall) {
    const double n = static_cast<double>(us.size());
    return v * n / (n - 1.0);
  }
  return v;
}

std::unique_ptr<PairedStatistic> make_paired_statistic(const StatisticSpec& spec,
                                                       std::span<const double> us,
                                                       std::span<const double> vs) {
  const std::string what = spec.name();
  switch (spec.kind) {
    case StatisticKind::pearson:
      check_pairs(us, vs, 2, what.c_str());
      if (is_constant(us) || is_constant(vs)) {
        fail(ErrorCode::degenerate_variance, "pearson: an input vector is constant");
      }
      return std::make_unique<PearsonPaired>(us, vs);
    case StatisticKind::kendall:
      check_pairs(us, vs, 2, what.c_str());
      return std::make_unique<KendallPaired>(us, vs);
    case StatisticKind::hoeffding_delta:
    case StatisticKind::kappa:
    case StatisticKind::tau_star:
      check_pairs(us, vs, 1, what.c_str());
      if (spec.estimator == Estimator::u_statistic) {
        return std::make_unique<EnumeratedPaired>(reference_kernels(spec.kind), true, us, vs);
      }
      if (spec.kind == StatisticKind::hoeffding_delta) {
        return std::make_unique<HoeffdingPaired>(us, vs);
      }
      if (spec.kind == StatisticKind::kappa) return std::make_unique<KappaPaired>(us, vs);
      return std::make_unique<TauStarPaired>(us, vs);
    case StatisticKind::custom:
      check_pairs(us, vs, 1, what.c_str());
      return std::make_unique<EnumeratedPaired>(
          KindKernels{spec.s_kernel, spec.t_kernel, spec.degree},
          spec.estimator == Estimator::u_statistic, us, vs);
  }
  fail(ErrorCode::invalid_argument, "unknown statistic kind");
}

double PairedStatistic::observed() const { return evaluate(identity(n_)); }

StatisticValue evaluate(const StatisticSpec& spec, std::span<const double> us,
                        std::span<const double> vs) {
  return {make_paired_statistic(spec, us, vs)->observed(), spec.kind, us.size()};
}

StatisticValue pearson_r(std::span<const double> us, std::span<const double> vs) {
  return evaluate(StatisticSpec::of(StatisticKind::pearson), us, vs);
}

StatisticValue kendall_tau(std::span<const double> us, std::span<const double> vs) {
  return evaluate(StatisticSpec::of(StatisticKind::kendall), us, vs);
}

StatisticValue hoeffding_delta(std::span<const double> us, std::span<const double> vs) {
  return evaluate(StatisticSpec::of(StatisticKind::hoeffding_delta), us, vs);
}

StatisticValue kappa_stat(std::span<const double> us, std::span<const double> vs) {
  return evaluate(StatisticSpec::of(StatisticKind::kappa), us, vs);
}

StatisticValue tau_star(std::span<const double> us, std::span<const double> vs) {
  return evaluate(StatisticSpec::of(StatisticKind::tau_star), us, vs);
}

StatisticValue partial_correlation_baseline(const Sample& sample, const EstimatorConfig& config) {
  const std::size_t n = sample.size();
  if (n < 3) fail(ErrorCode::invalid_argument, "partial correlation needs n >= 3");
  const auto xs = sample.xs();
  const auto ys = sample.ys();
  const auto zs = sample.zs();
  std::vector<double> ry(n), rz(n);
  double scale_y = 0.0, scale_z = 0.0, max_ry = 0.0, max_rz = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::optional<std::size_t> skip =
        config.leave_one_out() ? std::optional<std::size_t>(i) : std::nullopt;
    ry[i] = ys[i] - nw_regression(xs, ys, config.kernel(), config.bandwidth_y(), xs[i], skip);
    rz[i] = zs[i] - nw_regression(xs, zs, config.kernel(), config.bandwidth_z(), xs[i], skip);
    scale_y = std::max(scale_y, std::abs(ys[i]));
    scale_z = std::max(scale_z, std::abs(zs[i]));
    max_ry = std::max(max_ry, std::abs(ry[i]));
    max_rz = std::max(max_rz, std::abs(rz[i]));
  }
  constexpr double kRelativeFloor = 1e-12;
  if (max_ry <= kRelativeFloor * scale_y || max_rz <= kRelativeFloor * scale_z) {
    fail(ErrorCode::degenerate_variance, "regression residuals vanish");
  }
  return pearson_r(ry, rz);
}

}  // namespace pcit

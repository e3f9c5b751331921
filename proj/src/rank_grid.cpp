#include "pcit/rank_grid.hpp"

#include <algorithm>
#include <numeric>

namespace pcit {

DenseRanks dense_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(),
            [&](std::uint32_t a, std::uint32_t b) { return values[a] < values[b]; });
  DenseRanks out{std::vector<std::uint32_t>(n), 0};
  for (std::size_t k = 0; k < n; ++k) {
    if (k == 0 || values[order[k]] != values[order[k - 1]]) ++out.levels;
    out.rank[order[k]] = out.levels;
  }
  return out;
}

void CountGrid::build(std::span<const std::uint32_t> ru, std::uint32_t levels_u,
                      std::span<const std::uint32_t> rv, std::uint32_t levels_v,
                      std::span<const std::uint32_t> perm) {
  mu_ = levels_u;
  mv_ = levels_v;
  n_ = static_cast<std::int64_t>(ru.size());
  const std::size_t stride = mv_ + 1;
  cum_.assign((mu_ + 1) * stride, 0);
  for (std::size_t i = 0; i < ru.size(); ++i) {
    const std::uint32_t b = perm.empty() ? rv[i] : rv[perm[i]];
    ++cum_[ru[i] * stride + b];
  }
  for (std::uint32_t a = 1; a <= mu_; ++a) {
    std::int32_t row = 0;
    std::int32_t* cur = &cum_[a * stride];
    const std::int32_t* prev = &cum_[(a - 1) * stride];
    for (std::uint32_t b = 1; b <= mv_; ++b) {
      row += cur[b];
      cur[b] = prev[b] + row;
    }
  }
}

}  // namespace pcit

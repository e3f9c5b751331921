#pragma once

// Exact orthant counting on the (rank u) x (rank v) lattice. Ties share a
// dense rank, so every count below is exact for tied data as well.

#include <cstdint>
#include <span>
#include <vector>

namespace pcit {

struct DenseRanks {
  std::vector<std::uint32_t> rank;  // 1-based; equal values share a rank
  std::uint32_t levels = 0;         // number of distinct values
};

DenseRanks dense_ranks(std::span<const double> values);

class CountGrid {
 public:
  CountGrid() = default;

  // Builds cumulative counts for the points (ru[i], rv[perm[i]]). An empty
  // perm means the identity.
  void build(std::span<const std::uint32_t> ru, std::uint32_t levels_u,
             std::span<const std::uint32_t> rv, std::uint32_t levels_v,
             std::span<const std::uint32_t> perm = {});

  std::uint32_t levels_u() const noexcept { return mu_; }
  std::uint32_t levels_v() const noexcept { return mv_; }
  std::int64_t n() const noexcept { return n_; }

  // #{u <= level a, v <= level b}; a in [0, mu], b in [0, mv].
  std::int64_t le_le(std::uint32_t a, std::uint32_t b) const noexcept {
    return cum_[static_cast<std::size_t>(a) * (mv_ + 1) + b];
  }
  std::int64_t le_gt(std::uint32_t a, std::uint32_t b) const noexcept {
    return le_le(a, mv_) - le_le(a, b);
  }
  std::int64_t gt_le(std::uint32_t a, std::uint32_t b) const noexcept {
    return le_le(mu_, b) - le_le(a, b);
  }
  std::int64_t gt_gt(std::uint32_t a, std::uint32_t b) const noexcept {
    return n_ - le_le(a, mv_) - le_le(mu_, b) + le_le(a, b);
  }

 private:
  std::uint32_t mu_ = 0;
  std::uint32_t mv_ = 0;
  std::int64_t n_ = 0;
  std::vector<std::int32_t> cum_;
};

}  // namespace pcit

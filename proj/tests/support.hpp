#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace pcit::testing {

inline std::vector<double> uniform_vector(std::mt19937_64& rng, std::size_t n, double lo = 0.0,
                                          double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> out(n);
  for (auto& x : out) x = dist(rng);
  return out;
}

inline std::vector<double> normal_vector(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> dist;
  std::vector<double> out(n);
  for (auto& x : out) x = dist(rng);
  return out;
}

// Small integer grid so that ties show up often.
inline std::vector<double> tied_vector(std::mt19937_64& rng, std::size_t n, int levels = 3) {
  std::uniform_int_distribution<int> dist(0, levels - 1);
  std::vector<double> out(n);
  for (auto& x : out) x = dist(rng);
  return out;
}

}  // namespace pcit::testing

#include "pcit/random.hpp"

#include <array>

namespace pcit {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept {
  return mix64(mix64(seed) ^ mix64(tag + 0x632be59bd9b4e019ULL));
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t a = derive_seed(seed, index);
  const std::uint64_t b = mix64(a);
  const std::array<std::uint32_t, 4> words{
      static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

}  // namespace pcit

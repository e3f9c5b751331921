#pragma once

#include <cstdint>
#include <random>

namespace pcit {

/// SplitMix64 finalizer; a bijective 64-bit mix.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for an independent child stream, a pure function of (seed, tag).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept;

/// Engine for stream `index` of `seed`. Streams for different (seed, index)
/// pairs are statistically independent and do not depend on the order in
/// which they are created, so parallel loops reproduce serial results.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index);

}  // namespace pcit

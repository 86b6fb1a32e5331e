#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace groove {

// Identifier echoed in every results file. Bump the suffix if the generator
// or the shuffle procedure ever changes.
inline constexpr std::string_view kPrngId = "splitmix64-fisher-yates-lemire-v1";

// SplitMix64 (Steele, Lea, Flood 2014). Output i is a fixed bijective mix of
// seed + (i+1) * 0x9E3779B97F4A7C15, so the stream is a pure function of
// the seed on every platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_{seed} {}

  std::uint64_t next();

  // Uniform integer in [0, bound) by Lemire's multiply-and-reject method.
  // bound must be > 0.
  std::uint64_t bounded(std::uint64_t bound);

  // Uniform real in [0, 1) with 53 random bits.
  double uniform();

 private:
  std::uint64_t state_;
};

// In-place Fisher-Yates shuffle driven by `rng`. Iterates from the last
// element down, swapping with a uniformly chosen index in [0, i].
void shuffle(std::span<std::size_t> values, SplitMix64& rng);

}  // namespace groove

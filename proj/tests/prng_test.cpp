#include "groove/prng.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

namespace groove {
namespace {

std::uint64_t reference_splitmix(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

TEST(SplitMix64, MatchesReferenceStream) {
  for (std::uint64_t seed : {0ULL, 1ULL, 1234567ULL, 0xffffffffffffffffULL}) {
    SplitMix64 rng(seed);
    std::uint64_t state = seed;
    for (int i = 0; i < 100; ++i) ASSERT_EQ(rng.next(), reference_splitmix(state));
  }
}

TEST(SplitMix64, BoundedStaysInRangeAndCoversIt) {
  SplitMix64 rng(9);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto v = rng.bounded(7);
    ASSERT_LT(v, 7u);
    ++hits[v];
  }
  for (int h : hits) EXPECT_GT(h, 800);
}

TEST(SplitMix64, UniformInUnitInterval) {
  SplitMix64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Shuffle, ProducesPermutationDeterministically) {
  std::vector<std::size_t> a(50), b(50);
  std::iota(a.begin(), a.end(), 0);
  std::iota(b.begin(), b.end(), 0);
  SplitMix64 ra(42), rb(42);
  shuffle(a, ra);
  shuffle(b, rb);
  EXPECT_EQ(a, b);
  std::vector<std::size_t> sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) EXPECT_EQ(sorted[i], i);
  std::vector<std::size_t> identity(50);
  std::iota(identity.begin(), identity.end(), 0);
  EXPECT_NE(a, identity);
}

}  // namespace
}  // namespace groove

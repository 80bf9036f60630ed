#include "sparsethresh/random.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace sparsethresh {
namespace {

TEST(RandomStream, SameSeedSameSequence) {
  RandomStream a(7);
  RandomStream b(7);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(a.uniform(), b.uniform());
  }
  RandomStream c(7);
  RandomStream d(7);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(c.normal(), d.normal());
  }
}

TEST(RandomStream, UniformMatchesDocumentedTransform) {
  // The generator is pinned to mt19937_64 with (x >> 11) * 2^-53, so the
  // stream is reproducible bit-for-bit across platforms.
  RandomStream s(99);
  std::mt19937_64 engine(99);
  for (int i = 0; i < 50; ++i) {
    const double expected = static_cast<double>(engine() >> 11) * 0x1.0p-53;
    EXPECT_EQ(s.uniform(), expected);
  }
}

TEST(RandomStream, UniformInHalfOpenUnitInterval) {
  RandomStream s(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = s.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(RandomStream, NormalMomentsRoughlyStandard) {
  RandomStream s(2);
  const int n = 50000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = s.normal();
    sum += z;
    sum_sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.02);
  EXPECT_NEAR(sum_sq / n, 1.0, 0.03);
}

TEST(RandomStream, UniformIndexStaysInBoundsAndHitsAll) {
  RandomStream s(3);
  std::set<std::size_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t v = s.uniform_index(5);
    EXPECT_LT(v, 5u);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 5u);
  EXPECT_THROW(s.uniform_index(0), std::invalid_argument);
}

TEST(RandomStream, SampleWithoutReplacementIsDistinctAndInRange) {
  RandomStream s(4);
  for (int rep = 0; rep < 50; ++rep) {
    const auto batch = s.sample_without_replacement(10, 30);
    EXPECT_EQ(batch.size(), 10u);
    std::set<std::size_t> uniq(batch.begin(), batch.end());
    EXPECT_EQ(uniq.size(), 10u);
    EXPECT_LT(*std::max_element(batch.begin(), batch.end()), 30u);
  }
  EXPECT_THROW(s.sample_without_replacement(5, 4), std::invalid_argument);
}

TEST(RandomStream, SampleFullRangeIsPermutation) {
  RandomStream s(5);
  const auto all = s.sample_without_replacement(8, 8);
  std::set<std::size_t> uniq(all.begin(), all.end());
  EXPECT_EQ(uniq.size(), 8u);
}

}  // namespace
}  // namespace sparsethresh

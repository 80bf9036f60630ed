#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

namespace sparsethresh {

/// Deterministic random stream with platform-independent output.
///
/// The raw generator is std::mt19937_64, whose output sequence is pinned by
/// the C++ standard. All derived draws use fixed transforms of that sequence:
///   uniform():        (x >> 11) * 2^-53, uniform on [0, 1)
///   normal():         Box-Muller on (u1, u2) with u1 = 1 - uniform() in (0, 1];
///                     pairs are cached, so one raw pair feeds two calls
///   uniform_index(b): unbiased modulo with rejection of the low residue range
///
/// Identical seed plus identical call sequence reproduces the exact draws.
/// A stream is single-owner; parallel trials derive theirs as base_seed + index.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  std::size_t uniform_index(std::size_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_index: bound must be positive");
    const std::uint64_t b = bound;
    const std::uint64_t reject_below = (0 - b) % b;  // 2^64 mod b
    for (;;) {
      const std::uint64_t x = engine_();
      if (x >= reject_below) return static_cast<std::size_t>(x % b);
    }
  }

  /// count distinct indices from [0, bound), in draw order (partial Fisher-Yates).
  std::vector<std::size_t> sample_without_replacement(std::size_t count, std::size_t bound) {
    if (count > bound) {
      throw std::invalid_argument("sample_without_replacement: count exceeds bound");
    }
    std::vector<std::size_t> pool(bound);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t j = i + uniform_index(bound - i);
      std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    return pool;
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sparsethresh

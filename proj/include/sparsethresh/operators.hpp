#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "sparsethresh/linalg.hpp"

namespace sparsethresh {

/// Entries are exactly 0 or 1.
using BinaryVector = std::vector<std::uint8_t>;

/// Strictly increasing 0-based positions.
using SupportSet = std::vector<std::size_t>;

/// Keeps the k entries of largest absolute value, zeros the rest.
/// Ties break to the lowest index.
inline Vector hard_threshold(const Vector& v, std::size_t k) {
  const std::size_t n = v.size();
  if (k > n) throw std::invalid_argument("hard_threshold: k exceeds dimension");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&v](std::size_t a, std::size_t b) {
    const double ma = std::fabs(v[a]);
    const double mb = std::fabs(v[b]);
    if (ma != mb) return ma > mb;
    return a < b;
  });
  Vector out(n, 0.0);
  for (std::size_t i = 0; i < k; ++i) out[order[i]] = v[order[i]];
  return out;
}

/// Componentwise nearest point of {0,1}^n; the tie at 0.5 rounds to 1.
inline BinaryVector binary_round(const Vector& u) {
  BinaryVector bits(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) bits[i] = u[i] >= 0.5 ? 1 : 0;
  return bits;
}

/// Sets bit 1 on the indices of the k smallest entries of g, so the result
/// minimizes g.w over binary vectors with exactly k ones. Ties break to the
/// lowest index.
inline BinaryVector natural_select(const Vector& g, std::size_t k) {
  const std::size_t n = g.size();
  if (k > n) throw std::invalid_argument("natural_select: k exceeds dimension");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&g](std::size_t a, std::size_t b) {
    if (g[a] != g[b]) return g[a] < g[b];
    return a < b;
  });
  BinaryVector bits(n, 0);
  for (std::size_t i = 0; i < k; ++i) bits[order[i]] = 1;
  return bits;
}

/// Concave penalty sum_i w_i (1 - w_i); zero exactly on binary vectors.
inline double binary_penalty_value(const Vector& w) {
  double s = 0.0;
  for (double x : w) s += x * (1.0 - x);
  return s;
}

inline double binary_penalty_value(const BinaryVector&) { return 0.0; }

/// Gradient of the binary penalty: 1 - 2 w_i.
inline Vector binary_penalty_gradient(const Vector& w) {
  Vector g(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) g[i] = 1.0 - 2.0 * w[i];
  return g;
}

inline Vector binary_penalty_gradient(const BinaryVector& w) {
  Vector g(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) g[i] = w[i] ? -1.0 : 1.0;
  return g;
}

/// Indices with |v_i| > eps, ascending.
inline SupportSet support_of(const Vector& v, double eps = 0.0) {
  SupportSet s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (std::fabs(v[i]) > eps) s.push_back(i);
  }
  return s;
}

/// u masked by a binary vector: out_i = bits_i ? u_i : 0.
inline Vector masked(const Vector& u, const BinaryVector& bits) {
  if (u.size() != bits.size()) throw std::invalid_argument("masked: length mismatch");
  Vector out(u.size(), 0.0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (bits[i]) out[i] = u[i];
  }
  return out;
}

inline std::size_t count_ones(const BinaryVector& bits) {
  std::size_t c = 0;
  for (auto b : bits) c += b;
  return c;
}

}  // namespace sparsethresh

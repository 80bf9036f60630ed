#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace sparsethresh {

using Vector = std::vector<double>;

/// Row-major dense matrix of 64-bit reals.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  Matrix(std::size_t rows, std::size_t cols, Vector entries)
      : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) {
      throw std::invalid_argument("Matrix: entry count does not match rows*cols");
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) {
    return {data_.data() + i * cols_, cols_};
  }

  const Vector& data() const { return data_; }
  Vector& data() { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vector data_;
};

inline Vector zeros(std::size_t n) { return Vector(n, 0.0); }

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2_squared(std::span<const double> v) { return dot(v, v); }

inline double norm2(std::span<const double> v) { return std::sqrt(norm2_squared(v)); }

inline std::size_t count_nonzero(const Vector& v, double eps = 0.0) {
  std::size_t c = 0;
  for (double x : v) {
    if (std::fabs(x) > eps) ++c;
  }
  return c;
}

/// acc += scale * v
inline void add_scaled(Vector& acc, std::span<const double> v, double scale) {
  if (acc.size() != v.size()) throw std::invalid_argument("add_scaled: length mismatch");
  for (std::size_t i = 0; i < v.size(); ++i) acc[i] += scale * v[i];
}

inline Vector subtract(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("subtract: length mismatch");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

inline Vector scaled(const Vector& v, double c) {
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = c * v[i];
  return out;
}

inline Vector hadamard(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("hadamard: length mismatch");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

/// y = A x
inline Vector matvec(const Matrix& A, const Vector& x) {
  if (x.size() != A.cols()) throw std::invalid_argument("matvec: dimension mismatch");
  Vector y(A.rows());
  for (std::size_t i = 0; i < A.rows(); ++i) y[i] = dot(A.row(i), x);
  return y;
}

/// g = A^T r, accumulated row by row in ascending row order.
inline Vector matvec_transpose(const Matrix& A, const Vector& r) {
  if (r.size() != A.rows()) throw std::invalid_argument("matvec_transpose: dimension mismatch");
  Vector g(A.cols(), 0.0);
  for (std::size_t i = 0; i < A.rows(); ++i) add_scaled(g, A.row(i), r[i]);
  return g;
}

inline bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace sparsethresh

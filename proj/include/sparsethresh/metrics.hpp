#pragma once

#include <stdexcept>

#include "sparsethresh/linalg.hpp"
#include "sparsethresh/operators.hpp"

namespace sparsethresh {

/// Tolerance separating solver float dust from genuine support entries.
inline constexpr double kSupportEps = 1e-10;

/// ||x - x*||_2 / ||x*||_2
inline double relative_error(const Vector& x, const Vector& x_star) {
  if (x.size() != x_star.size()) throw std::invalid_argument("relative_error: length mismatch");
  const double denom = norm2(x_star);
  if (denom == 0.0) throw std::invalid_argument("relative_error: zero reference vector");
  return norm2(subtract(x, x_star)) / denom;
}

/// Exact support equality: supp(x) at eps 1e-10 versus supp(x*) at zero.
inline bool support_success(const Vector& x, const Vector& x_star) {
  if (x.size() != x_star.size()) throw std::invalid_argument("support_success: length mismatch");
  return support_of(x, kSupportEps) == support_of(x_star, 0.0);
}

/// Fraction of rows with sign(a_i . x) != y_i; sign(0) counts as misclassified.
inline double misclassification_rate(const Matrix& A, const Vector& labels, const Vector& x) {
  if (labels.size() != A.rows()) throw std::invalid_argument("misclassification_rate: rows mismatch");
  if (x.size() != A.cols()) throw std::invalid_argument("misclassification_rate: dimension mismatch");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < A.rows(); ++i) {
    const double t = dot(A.row(i), x);
    const double predicted = t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0);
    if (predicted != labels[i]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(A.rows());
}

}  // namespace sparsethresh

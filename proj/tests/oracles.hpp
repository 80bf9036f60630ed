#pragma once

// Independent reference implementations used only by the tests. Each oracle
// deliberately uses a different algorithm (and where possible a different
// numerical route) than the library code it checks.

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "sparsethresh/linalg.hpp"
#include "sparsethresh/objectives.hpp"
#include "sparsethresh/operators.hpp"

namespace sparsethresh::testing {

/// All k-subsets of {0..n-1}, built by recursion (the library walks them with
/// an odometer). Order is lexicographic.
inline std::vector<std::vector<std::size_t>> oracle_combinations(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> all;
  std::vector<std::size_t> current;
  const auto recurse = [&](auto&& self, std::size_t next) -> void {
    if (current.size() == k) {
      all.push_back(current);
      return;
    }
    const std::size_t needed = k - current.size();
    for (std::size_t i = next; i + needed <= n; ++i) {
      current.push_back(i);
      self(self, i + 1);
      current.pop_back();
    }
  };
  recurse(recurse, 0);
  return all;
}

inline Eigen::MatrixXd to_eigen(const Matrix& A) {
  Eigen::MatrixXd M(A.rows(), A.cols());
  for (std::size_t i = 0; i < A.rows(); ++i) {
    for (std::size_t j = 0; j < A.cols(); ++j) M(i, j) = A(i, j);
  }
  return M;
}

/// RIP constant via singular values of each column submatrix (the library uses
/// eigenvalues of the Gram matrix instead).
inline double oracle_rip_svd(const Matrix& A, std::size_t k) {
  const Eigen::MatrixXd M = to_eigen(A);
  double delta = 0.0;
  for (const auto& support : oracle_combinations(A.cols(), k)) {
    Eigen::MatrixXd sub(A.rows(), support.size());
    for (std::size_t j = 0; j < support.size(); ++j) sub.col(j) = M.col(support[j]);
    const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(sub).singularValues();
    const double hi = sv(0) * sv(0);
    const double lo = sv(sv.size() - 1) * sv(sv.size() - 1);
    delta = std::max({delta, hi - 1.0, 1.0 - lo});
  }
  return delta;
}

/// Minimum-norm least-squares solution of min ||A_S z - y|| via an SVD
/// pseudo-inverse, embedded back into an n-vector.
inline Vector oracle_restricted_lsq(const Matrix& A, const Vector& y, const SupportSet& support) {
  const Eigen::MatrixXd M = to_eigen(A);
  Eigen::MatrixXd sub(A.rows(), support.size());
  for (std::size_t j = 0; j < support.size(); ++j) sub.col(j) = M.col(support[j]);
  Eigen::VectorXd rhs(A.rows());
  for (std::size_t i = 0; i < A.rows(); ++i) rhs(i) = y[i];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sub, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();
  const double cutoff = 1e-12 * (sv.size() > 0 ? sv(0) : 0.0);
  Eigen::VectorXd inv_sv(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i) inv_sv(i) = sv(i) > cutoff ? 1.0 / sv(i) : 0.0;
  const Eigen::VectorXd z =
      svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose() * rhs;
  Vector out(A.cols(), 0.0);
  for (std::size_t j = 0; j < support.size(); ++j) out[support[j]] = z(j);
  return out;
}

/// Central finite-difference gradient probing value() only.
inline Vector oracle_fd_gradient(const ObjectiveModel& obj, const Vector& x, double h) {
  Vector fd(x.size());
  Vector probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double hi = h * (1.0 + std::fabs(x[i]));
    probe[i] = x[i] + hi;
    const double fp = obj.value(probe);
    probe[i] = x[i] - hi;
    const double fm = obj.value(probe);
    probe[i] = x[i];
    fd[i] = (fp - fm) / (2.0 * hi);
  }
  return fd;
}

/// Argmin of g.w over binary w with exactly k ones, by recursive enumeration;
/// ties resolve to the lexicographically first subset.
inline BinaryVector oracle_min_dot_binary(const Vector& g, std::size_t k) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> best_support;
  for (const auto& support : oracle_combinations(g.size(), k)) {
    double s = 0.0;
    for (std::size_t i : support) s += g[i];
    if (s < best) {
      best = s;
      best_support = support;
    }
  }
  BinaryVector w(g.size(), 0);
  for (std::size_t i : best_support) w[i] = 1;
  return w;
}

/// Best k-term approximation support: maximizes kept energy, lexicographically
/// first among ties. Returns the masked vector.
inline Vector oracle_best_kterm(const Vector& v, std::size_t k) {
  double best = -1.0;
  std::vector<std::size_t> best_support;
  for (const auto& support : oracle_combinations(v.size(), k)) {
    double s = 0.0;
    for (std::size_t i : support) s += v[i] * v[i];
    if (s > best) {
      best = s;
      best_support = support;
    }
  }
  Vector out(v.size(), 0.0);
  for (std::size_t i : best_support) out[i] = v[i];
  return out;
}

}  // namespace sparsethresh::testing

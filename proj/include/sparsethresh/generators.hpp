#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>

#include "sparsethresh/linalg.hpp"
#include "sparsethresh/objectives.hpp"
#include "sparsethresh/random.hpp"

namespace sparsethresh {

enum class NormalizeMode { columns, rows, none };

/// i.i.d. standard normal matrix, filled row by row in row-major order, then
/// optionally rescaled so every column (or row) has unit l2 norm.
inline Matrix gen_gaussian_matrix(std::size_t m, std::size_t n, NormalizeMode mode,
                                  RandomStream& stream) {
  if (m == 0 || n == 0) throw std::invalid_argument("gen_gaussian_matrix: zero dimension");
  Matrix A(m, n);
  for (double& v : A.data()) v = stream.normal();
  if (mode == NormalizeMode::columns) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < m; ++i) s += A(i, j) * A(i, j);
      const double norm = std::sqrt(s);
      if (norm == 0.0) throw std::runtime_error("gen_gaussian_matrix: zero column");
      for (std::size_t i = 0; i < m; ++i) A(i, j) /= norm;
    }
  } else if (mode == NormalizeMode::rows) {
    for (std::size_t i = 0; i < m; ++i) {
      const double norm = norm2(A.row(i));
      if (norm == 0.0) throw std::runtime_error("gen_gaussian_matrix: zero row");
      for (double& v : A.row(i)) v /= norm;
    }
  }
  return A;
}

/// Unit-norm vector with exactly k standard-normal entries at positions drawn
/// uniformly without replacement.
inline Vector gen_sparse_signal(std::size_t n, std::size_t k, RandomStream& stream) {
  if (k == 0 || k > n) throw std::invalid_argument("gen_sparse_signal: need 1 <= k <= n");
  const auto support = stream.sample_without_replacement(k, n);
  Vector x(n, 0.0);
  double s = 0.0;
  for (std::size_t idx : support) {
    double v;
    do {
      v = stream.normal();
    } while (v == 0.0);  // keep the nonzero count exact
    x[idx] = v;
    s += v * v;
  }
  const double norm = std::sqrt(s);
  for (std::size_t idx : support) x[idx] /= norm;
  return x;
}

/// y = A x* + noise, noise i.i.d. normal(0, noise_std^2); noise_std = 0 gives
/// the exact measurements.
inline Vector gen_linear_measurements(const Matrix& A, const Vector& x_star, double noise_std,
                                      RandomStream& stream) {
  if (noise_std < 0.0) throw std::invalid_argument("gen_linear_measurements: negative noise_std");
  Vector y = matvec(A, x_star);
  if (noise_std > 0.0) {
    for (double& v : y) v += noise_std * stream.normal();
  }
  return y;
}

/// Labels in {-1,+1}: +1 with probability sigmoid(a_i . x*), independently per row.
inline Vector gen_classification_labels(const Matrix& A, const Vector& x_star,
                                        RandomStream& stream) {
  const Vector scores = matvec(A, x_star);
  Vector labels(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double p = stable_sigmoid(scores[i]);
    labels[i] = stream.uniform() < p ? 1.0 : -1.0;
  }
  return labels;
}

enum class ProblemType { linear, logistic, svm };

inline std::string to_string(ProblemType t) {
  switch (t) {
    case ProblemType::linear: return "linear";
    case ProblemType::logistic: return "logistic";
    case ProblemType::svm: return "svm";
  }
  throw std::invalid_argument("unknown problem type");
}

inline ProblemType problem_type_from_string(const std::string& s) {
  if (s == "linear") return ProblemType::linear;
  if (s == "logistic") return ProblemType::logistic;
  if (s == "svm") return ProblemType::svm;
  throw std::invalid_argument("unknown problem type: " + s);
}

struct ProblemInstance {
  ProblemType type = ProblemType::linear;
  Matrix matrix;
  Vector target;  // measurements y for linear, labels in {-1,+1} otherwise
  Vector truth;
  std::size_t sparsity = 0;
  std::uint64_t seed = 0;
};

/// Builds a problem from one seeded stream. Linear instances use unit-column
/// sensing matrices; classification instances use unit-row matrices. Draw
/// order is fixed: matrix, truth, then target.
inline ProblemInstance make_problem(ProblemType type, std::size_t m, std::size_t n, std::size_t k,
                                    double noise_std, std::uint64_t seed) {
  RandomStream stream(seed);
  ProblemInstance p;
  p.type = type;
  p.sparsity = k;
  p.seed = seed;
  const NormalizeMode mode =
      type == ProblemType::linear ? NormalizeMode::columns : NormalizeMode::rows;
  p.matrix = gen_gaussian_matrix(m, n, mode, stream);
  p.truth = gen_sparse_signal(n, k, stream);
  if (type == ProblemType::linear) {
    p.target = gen_linear_measurements(p.matrix, p.truth, noise_std, stream);
  } else {
    p.target = gen_classification_labels(p.matrix, p.truth, stream);
  }
  return p;
}

/// Objective the instance's recovery problem minimizes.
inline std::unique_ptr<ObjectiveModel> make_objective(const ProblemInstance& p) {
  switch (p.type) {
    case ProblemType::linear:
      return std::make_unique<LeastSquaresObjective>(p.matrix, p.target);
    case ProblemType::logistic:
      return std::make_unique<LogisticObjective>(p.matrix, p.target);
    case ProblemType::svm:
      return std::make_unique<SquaredHingeObjective>(p.matrix, p.target);
  }
  throw std::invalid_argument("unknown problem type");
}

}  // namespace sparsethresh

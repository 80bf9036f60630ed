#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sparsethresh/linalg.hpp"
#include "sparsethresh/operators.hpp"

namespace sparsethresh {

/// Overflow-safe log(1 + exp(z)).
inline double softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::fabs(z)));
}

/// Overflow-safe logistic sigmoid 1 / (1 + exp(-z)).
inline double stable_sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

struct RestrictedMinimizeResult {
  Vector point;
  /// Rank-deficient restricted system; the point is the minimum-norm solution.
  bool degenerate = false;
  std::size_t inner_iterations = 0;
  /// Norm of the gradient restricted to the support at exit (stopping certificate).
  double restricted_grad_norm = 0.0;
};

/// Separable objective f(x) = (1/M) * sum_{i=1}^{M} component_i(x).
///
/// gradient() is the exact derivative of value(); batch_gradient() over the
/// full index set agrees with gradient() up to roundoff.
class ObjectiveModel {
 public:
  virtual ~ObjectiveModel() = default;

  virtual std::size_t dimension() const = 0;
  virtual std::size_t component_count() const = 0;

  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;
  virtual double component_value(std::size_t i, const Vector& x) const = 0;
  virtual Vector component_gradient(std::size_t i, const Vector& x) const = 0;

  /// (1/|B|) * sum_{i in B} component_gradient(i, x), accumulated in the
  /// caller's batch order.
  virtual Vector batch_gradient(const std::vector<std::size_t>& batch, const Vector& x) const {
    if (batch.empty()) throw std::invalid_argument("batch_gradient: empty batch");
    Vector acc(dimension(), 0.0);
    for (std::size_t i : batch) {
      if (i >= component_count()) throw std::invalid_argument("batch_gradient: index out of range");
      const Vector g = component_gradient(i, x);
      for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += g[j];
    }
    const double inv = 1.0 / static_cast<double>(batch.size());
    for (double& v : acc) v *= inv;
    return acc;
  }

  /// Minimizes the objective over vectors supported on S, warm-started at x0.
  /// The generic path is projected gradient descent with backtracking line
  /// search, stopping when the restricted gradient norm falls below tol.
  virtual RestrictedMinimizeResult restricted_minimize(const SupportSet& support,
                                                       const Vector& x0, double tol,
                                                       std::size_t max_inner) const {
    check_support(support);
    RestrictedMinimizeResult out;
    out.point = project_onto(support, x0);
    double f = value(out.point);
    double step = 1.0;
    for (std::size_t it = 0; it < max_inner; ++it) {
      Vector g = gradient(out.point);
      Vector gs(dimension(), 0.0);
      for (std::size_t j : support) gs[j] = g[j];
      const double gnorm = norm2(gs);
      out.restricted_grad_norm = gnorm;
      out.inner_iterations = it;
      if (gnorm <= tol) return out;
      // Armijo backtracking; the accepted step seeds the next iteration.
      step = std::min(step * 2.0, 1e12);
      bool accepted = false;
      for (int half = 0; half < 80; ++half) {
        Vector trial = out.point;
        for (std::size_t j : support) trial[j] -= step * gs[j];
        const double ft = value(trial);
        if (ft <= f - 1e-4 * step * gnorm * gnorm) {
          out.point = std::move(trial);
          f = ft;
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) return out;  // no descent direction at machine scale
    }
    Vector g = gradient(out.point);
    double gsq = 0.0;
    for (std::size_t j : support) gsq += g[j] * g[j];
    out.restricted_grad_norm = std::sqrt(gsq);
    out.inner_iterations = max_inner;
    return out;
  }

  /// Loss used for stopping rules and trace reporting; defaults to value().
  virtual double loss(const Vector& x) const { return value(x); }

  /// True when x sits close enough to a non-smooth locus that finite
  /// differences of the gradient are unreliable. Smooth objectives: never.
  virtual bool kink_adjacent(const Vector&, double /*window*/) const { return false; }

 protected:
  void check_dimension(const Vector& x) const {
    if (x.size() != dimension()) throw std::invalid_argument("objective: dimension mismatch");
  }
  void check_support(const SupportSet& support) const {
    if (support.empty()) throw std::invalid_argument("restricted_minimize: empty support");
    for (std::size_t i = 0; i < support.size(); ++i) {
      if (support[i] >= dimension()) throw std::invalid_argument("restricted_minimize: index out of range");
      if (i > 0 && support[i] <= support[i - 1]) {
        throw std::invalid_argument("restricted_minimize: support must be strictly increasing");
      }
    }
  }
  Vector project_onto(const SupportSet& support, const Vector& x0) const {
    check_dimension(x0);
    Vector z(dimension(), 0.0);
    for (std::size_t j : support) z[j] = x0[j];
    return z;
  }
};

/// f(x) = ||A x - y||_2^2 with components m * (a_i.x - y_i)^2, so the mean of
/// the components reproduces the aggregate exactly.
class LeastSquaresObjective : public ObjectiveModel {
 public:
  LeastSquaresObjective(Matrix A, Vector y) : A_(std::move(A)), y_(std::move(y)) {
    if (y_.size() != A_.rows()) throw std::invalid_argument("LeastSquaresObjective: rows mismatch");
  }

  std::size_t dimension() const override { return A_.cols(); }
  std::size_t component_count() const override { return A_.rows(); }

  double value(const Vector& x) const override {
    check_dimension(x);
    return norm2_squared(residual(x));
  }

  /// 2 A^T (A x - y): the exact derivative of the squared residual. Note this
  /// carries a factor 2 relative to step sizes quoted for A^T(Ax - y).
  Vector gradient(const Vector& x) const override {
    check_dimension(x);
    return scaled(matvec_transpose(A_, residual(x)), 2.0);
  }

  double component_value(std::size_t i, const Vector& x) const override {
    check_dimension(x);
    const double r = dot(A_.row(i), x) - y_[i];
    return static_cast<double>(A_.rows()) * r * r;
  }

  Vector component_gradient(std::size_t i, const Vector& x) const override {
    check_dimension(x);
    const double r = dot(A_.row(i), x) - y_[i];
    Vector g(A_.cols());
    const double c = 2.0 * static_cast<double>(A_.rows()) * r;
    const auto row = A_.row(i);
    for (std::size_t j = 0; j < g.size(); ++j) g[j] = c * row[j];
    return g;
  }

  /// Exact direct solve of the normal equations on the column submatrix A_S.
  /// Rank-deficient systems fall back to the minimum-norm solution and set the
  /// degeneracy flag.
  RestrictedMinimizeResult restricted_minimize(const SupportSet& support, const Vector& x0,
                                               double /*tol*/,
                                               std::size_t /*max_inner*/) const override {
    check_support(support);
    check_dimension(x0);
    const std::size_t m = A_.rows();
    const std::size_t s = support.size();
    Eigen::MatrixXd sub(m, s);
    for (std::size_t j = 0; j < s; ++j) {
      for (std::size_t i = 0; i < m; ++i) sub(i, j) = A_(i, support[j]);
    }
    Eigen::VectorXd rhs(m);
    for (std::size_t i = 0; i < m; ++i) rhs(i) = y_[i];

    RestrictedMinimizeResult out;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sub);
    Eigen::VectorXd z;
    if (static_cast<std::size_t>(qr.rank()) < s) {
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(sub);
      z = cod.solve(rhs);
      out.degenerate = true;
    } else {
      z = qr.solve(rhs);
    }
    out.point.assign(dimension(), 0.0);
    for (std::size_t j = 0; j < s; ++j) out.point[support[j]] = z(j);
    const Eigen::VectorXd res_grad = 2.0 * sub.transpose() * (sub * z - rhs);
    out.restricted_grad_norm = res_grad.norm();
    return out;
  }

  /// Residual norm ||y - A x||_2, the quantity the linear stopping rule and
  /// trace loss column use.
  double loss(const Vector& x) const override { return norm2(residual(x)); }

  const Matrix& matrix() const { return A_; }
  const Vector& measurements() const { return y_; }

 private:
  Vector residual(const Vector& x) const {
    Vector r = matvec(A_, x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= y_[i];
    return r;
  }

  Matrix A_;
  Vector y_;
};

/// Common machinery for objectives of the form (1/m) sum_i loss(y_i * a_i.x)
/// with labels y_i in {-1,+1}.
class MarginObjective : public ObjectiveModel {
 public:
  MarginObjective(Matrix A, Vector labels) : A_(std::move(A)), labels_(std::move(labels)) {
    if (labels_.size() != A_.rows()) throw std::invalid_argument("MarginObjective: rows mismatch");
    for (double y : labels_) {
      if (y != 1.0 && y != -1.0) throw std::invalid_argument("MarginObjective: labels must be -1 or +1");
    }
  }

  std::size_t dimension() const override { return A_.cols(); }
  std::size_t component_count() const override { return A_.rows(); }

  double value(const Vector& x) const override {
    check_dimension(x);
    const std::size_t m = A_.rows();
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += margin_loss(labels_[i] * dot(A_.row(i), x));
    return s / static_cast<double>(m);
  }

  Vector gradient(const Vector& x) const override {
    check_dimension(x);
    const std::size_t m = A_.rows();
    Vector g(A_.cols(), 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const double c = margin_loss_slope(labels_[i] * dot(A_.row(i), x)) * labels_[i];
      add_scaled(g, A_.row(i), c);
    }
    const double inv = 1.0 / static_cast<double>(m);
    for (double& v : g) v *= inv;
    return g;
  }

  double component_value(std::size_t i, const Vector& x) const override {
    check_dimension(x);
    return margin_loss(labels_[i] * dot(A_.row(i), x));
  }

  Vector component_gradient(std::size_t i, const Vector& x) const override {
    check_dimension(x);
    const double c = margin_loss_slope(labels_[i] * dot(A_.row(i), x)) * labels_[i];
    Vector g(A_.cols());
    const auto row = A_.row(i);
    for (std::size_t j = 0; j < g.size(); ++j) g[j] = c * row[j];
    return g;
  }

  /// Projected descent on the support columns only; all inner work is O(m*|S|).
  RestrictedMinimizeResult restricted_minimize(const SupportSet& support, const Vector& x0,
                                               double tol, std::size_t max_inner) const override {
    check_support(support);
    check_dimension(x0);
    const std::size_t m = A_.rows();
    const std::size_t s = support.size();
    Matrix sub(m, s);
    for (std::size_t i = 0; i < m; ++i) {
      const auto row = A_.row(i);
      for (std::size_t j = 0; j < s; ++j) sub(i, j) = row[support[j]];
    }
    Vector z(s);
    for (std::size_t j = 0; j < s; ++j) z[j] = x0[support[j]];

    const auto sub_value = [&](const Vector& zz) {
      double acc = 0.0;
      for (std::size_t i = 0; i < m; ++i) acc += margin_loss(labels_[i] * dot(sub.row(i), zz));
      return acc / static_cast<double>(m);
    };
    const auto sub_gradient = [&](const Vector& zz) {
      Vector g(s, 0.0);
      for (std::size_t i = 0; i < m; ++i) {
        const double c = margin_loss_slope(labels_[i] * dot(sub.row(i), zz)) * labels_[i];
        add_scaled(g, sub.row(i), c);
      }
      const double inv = 1.0 / static_cast<double>(m);
      for (double& v : g) v *= inv;
      return g;
    };

    RestrictedMinimizeResult out;
    double f = sub_value(z);
    double step = 1.0;
    for (std::size_t it = 0; it < max_inner; ++it) {
      const Vector g = sub_gradient(z);
      const double gnorm = norm2(g);
      out.restricted_grad_norm = gnorm;
      out.inner_iterations = it;
      if (gnorm <= tol) break;
      step = std::min(step * 2.0, 1e12);
      bool accepted = false;
      for (int half = 0; half < 80; ++half) {
        Vector trial = z;
        for (std::size_t j = 0; j < s; ++j) trial[j] -= step * g[j];
        const double ft = sub_value(trial);
        if (ft <= f - 1e-4 * step * gnorm * gnorm) {
          z = std::move(trial);
          f = ft;
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;
      out.inner_iterations = it + 1;
    }
    out.point.assign(dimension(), 0.0);
    for (std::size_t j = 0; j < s; ++j) out.point[support[j]] = z[j];
    return out;
  }

  const Matrix& matrix() const { return A_; }
  const Vector& labels() const { return labels_; }

 protected:
  virtual double margin_loss(double t) const = 0;
  virtual double margin_loss_slope(double t) const = 0;

  Matrix A_;
  Vector labels_;
};

/// f(x) = (1/m) sum_i log(1 + exp(-2 y_i a_i.x)), evaluated in the stable
/// softplus form.
class LogisticObjective : public MarginObjective {
 public:
  using MarginObjective::MarginObjective;

 protected:
  double margin_loss(double t) const override { return softplus(-2.0 * t); }
  double margin_loss_slope(double t) const override { return -2.0 * stable_sigmoid(-2.0 * t); }
};

/// f(x) = (1/2m) sum_i max(0, 1 - y_i a_i.x)^2; C^1 with slope 0 at the kink.
class SquaredHingeObjective : public MarginObjective {
 public:
  using MarginObjective::MarginObjective;

  /// A margin sits within `window` of the hinge point, where second
  /// derivatives jump and finite differences degrade.
  bool kink_adjacent(const Vector& x, double window) const override {
    for (std::size_t i = 0; i < A_.rows(); ++i) {
      if (std::fabs(1.0 - labels_[i] * dot(A_.row(i), x)) <= window) return true;
    }
    return false;
  }

 protected:
  double margin_loss(double t) const override {
    const double h = std::max(0.0, 1.0 - t);
    return 0.5 * h * h;
  }
  double margin_loss_slope(double t) const override { return -std::max(0.0, 1.0 - t); }
};

}  // namespace sparsethresh

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sparsethresh/linalg.hpp"
#include "sparsethresh/objectives.hpp"
#include "sparsethresh/operators.hpp"
#include "sparsethresh/random.hpp"

namespace sparsethresh {

/// Enumeration ceiling for the brute-force diagnostics.
inline constexpr double kEnumerationGuard = 1e6;

inline double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double result = 1.0;
  for (std::size_t i = 0; i < k; ++i) {
    result *= static_cast<double>(n - i) / static_cast<double>(i + 1);
  }
  return result;
}

/// Advances a sorted index set to the next k-subset of {0,...,n-1} in
/// lexicographic order. Returns false once the last subset has been seen.
inline bool next_subset(std::vector<std::size_t>& idx, std::size_t n) {
  const std::size_t k = idx.size();
  for (std::size_t pos = k; pos-- > 0;) {
    if (idx[pos] + 1 <= n - (k - pos)) {
      ++idx[pos];
      for (std::size_t j = pos + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

inline std::vector<std::size_t> first_subset(std::size_t k) {
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  return idx;
}

namespace detail {
inline void check_enumeration(std::size_t n, std::size_t k, const char* who) {
  if (k == 0 || k > n) {
    throw std::invalid_argument(std::string(who) + ": need 1 <= k <= n");
  }
  if (binomial(n, k) > kEnumerationGuard) {
    throw std::invalid_argument(std::string(who) +
                                ": support enumeration exceeds the guard of 1e6 subsets");
  }
}
}  // namespace detail

/// Exact RIP constant by enumerating every size-k column support:
///   delta_k = max over |S| = k of max(lambda_max(A_S^T A_S) - 1,
///                                     1 - lambda_min(A_S^T A_S)).
inline double rip_constant_bruteforce(const Matrix& A, std::size_t k) {
  detail::check_enumeration(A.cols(), k, "rip_constant_bruteforce");
  const std::size_t m = A.rows();
  Eigen::MatrixXd sub(m, k);
  double delta = 0.0;
  auto idx = first_subset(k);
  do {
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t i = 0; i < m; ++i) sub(i, j) = A(i, idx[j]);
    }
    const Eigen::MatrixXd gram = sub.transpose() * sub;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
    const auto& lambda = eig.eigenvalues();
    delta = std::max(delta, std::max(lambda(k - 1) - 1.0, 1.0 - lambda(0)));
  } while (next_subset(idx, A.cols()));
  return delta;
}

struct CurvatureEstimate {
  // Extremes of the quadratic-envelope ratio
  //   2 [f(x') - f(x) - <grad f(x), x' - x>] / ||x' - x||^2
  // over sampled restricted pairs: the max bounds the upper envelope constant
  // from below, the min bounds the lower envelope constant from above.
  double smoothness = 0.0;
  double convexity = std::numeric_limits<double>::infinity();
};

/// Samples random pairs sharing a size-k support and measures the restricted
/// smoothness / convexity behavior of the objective over them. Both figures
/// come from the same envelope ratio, so for least squares they sit inside
/// [2(1 - delta_k), 2(1 + delta_k)].
inline CurvatureEstimate empirical_rss_rsc(const ObjectiveModel& obj, std::size_t k,
                                           std::size_t trials, RandomStream& stream) {
  const std::size_t n = obj.dimension();
  if (k == 0 || k > n) throw std::invalid_argument("empirical_rss_rsc: need 1 <= k <= n");
  if (trials == 0) throw std::invalid_argument("empirical_rss_rsc: need trials >= 1");
  CurvatureEstimate est;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto support = stream.sample_without_replacement(k, n);
    Vector x(n, 0.0);
    Vector xp(n, 0.0);
    double dist_sq = 0.0;
    do {
      dist_sq = 0.0;
      for (std::size_t i : support) {
        x[i] = stream.normal();
        xp[i] = stream.normal();
        const double d = xp[i] - x[i];
        dist_sq += d * d;
      }
    } while (dist_sq <= 0.0);
    const Vector gx = obj.gradient(x);
    const double gap = obj.value(xp) - obj.value(x) - dot(gx, subtract(xp, x));
    const double ratio = 2.0 * gap / dist_sq;
    est.smoothness = std::max(est.smoothness, ratio);
    est.convexity = std::min(est.convexity, ratio);
  }
  return est;
}

struct ContractionReport {
  std::vector<double> ratios;  // consecutive error ratios over the contraction phase
  double geometric_mean = std::numeric_limits<double>::quiet_NaN();
  double floor_estimate = 0.0;  // asymptotic error level once progress stalls
};

/// Summarizes a sequence of iterate error norms. The contraction phase is the
/// prefix where errors still exceed 10x the final error; if no step qualifies
/// (the sequence never flattened out) every step counts. Ratios are only
/// formed where the denominator is positive.
inline ContractionReport contraction_report(const std::vector<double>& errors) {
  if (errors.size() < 2) {
    throw std::invalid_argument("contraction_report: need at least 2 error values");
  }
  const double threshold = 10.0 * errors.back();
  ContractionReport report;
  for (std::size_t t = 0; t + 1 < errors.size(); ++t) {
    if (errors[t] > threshold && errors[t] > 0.0) {
      report.ratios.push_back(errors[t + 1] / errors[t]);
    }
  }
  if (report.ratios.empty()) {
    for (std::size_t t = 0; t + 1 < errors.size(); ++t) {
      if (errors[t] > 0.0) report.ratios.push_back(errors[t + 1] / errors[t]);
    }
  }
  if (!report.ratios.empty()) {
    bool hit_zero = false;
    double log_sum = 0.0;
    for (double r : report.ratios) {
      if (r <= 0.0) {
        hit_zero = true;
        break;
      }
      log_sum += std::log(r);
    }
    report.geometric_mean =
        hit_zero ? 0.0 : std::exp(log_sum / static_cast<double>(report.ratios.size()));
  }
  std::vector<double> floor_phase;
  for (double e : errors) {
    if (e <= threshold) floor_phase.push_back(e);
  }
  if (floor_phase.empty()) {
    report.floor_estimate = errors.back();
  } else {
    std::sort(floor_phase.begin(), floor_phase.end());
    const std::size_t mid = floor_phase.size() / 2;
    report.floor_estimate = floor_phase.size() % 2 == 1
                                ? floor_phase[mid]
                                : 0.5 * (floor_phase[mid - 1] + floor_phase[mid]);
  }
  return report;
}

/// Central-difference check of the analytic gradient. The per-coordinate step
/// scales with the coordinate magnitude; deviations are measured relative to
/// max(1, |analytic component|). Returns the worst deviation.
inline double gradient_fd_check(const ObjectiveModel& obj, const Vector& x, double h) {
  if (h <= 0.0) throw std::invalid_argument("gradient_fd_check: h must be positive");
  const Vector grad = obj.gradient(x);
  Vector probe = x;
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double hi = h * (1.0 + std::fabs(x[i]));
    probe[i] = x[i] + hi;
    const double fp = obj.value(probe);
    probe[i] = x[i] - hi;
    const double fm = obj.value(probe);
    probe[i] = x[i];
    const double fd = (fp - fm) / (2.0 * hi);
    worst = std::max(worst, std::fabs(fd - grad[i]) / std::max(1.0, std::fabs(grad[i])));
  }
  return worst;
}

/// Brute-force best k-term approximation in the l2 sense: keeps the size-k
/// support with the most captured energy (ties resolved toward the
/// lexicographically smallest index set).
inline Vector bruteforce_best_kterm(const Vector& v, std::size_t k) {
  detail::check_enumeration(v.size(), k, "bruteforce_best_kterm");
  auto idx = first_subset(k);
  std::vector<std::size_t> best = idx;
  double best_energy = -1.0;
  do {
    double energy = 0.0;
    for (std::size_t i : idx) energy += v[i] * v[i];
    if (energy > best_energy) {
      best_energy = energy;
      best = idx;
    }
  } while (next_subset(idx, v.size()));
  Vector out(v.size(), 0.0);
  for (std::size_t i : best) out[i] = v[i];
  return out;
}

/// Brute-force minimizer of sum_{i in S} g_i over size-k index sets, as a
/// binary indicator (ties resolved toward the lexicographically smallest set).
inline BinaryVector bruteforce_min_dot_support(const Vector& g, std::size_t k) {
  detail::check_enumeration(g.size(), k, "bruteforce_min_dot_support");
  auto idx = first_subset(k);
  std::vector<std::size_t> best = idx;
  double best_sum = std::numeric_limits<double>::infinity();
  do {
    double sum = 0.0;
    for (std::size_t i : idx) sum += g[i];
    if (sum < best_sum) {
      best_sum = sum;
      best = idx;
    }
  } while (next_subset(idx, g.size()));
  BinaryVector out(g.size(), 0);
  for (std::size_t i : best) out[i] = 1;
  return out;
}

struct BruteforceSolution {
  SupportSet support;
  Vector point;
  double value = std::numeric_limits<double>::infinity();
};

/// Exhaustive combinatorial solve: minimizes the objective restricted to each
/// size-k support and returns the best. Only intended as a test oracle on
/// small instances.
inline BruteforceSolution bruteforce_optimal_support(const ObjectiveModel& obj, std::size_t k,
                                                     double tol = 1e-10,
                                                     std::size_t max_inner = 1000) {
  detail::check_enumeration(obj.dimension(), k, "bruteforce_optimal_support");
  const Vector origin = zeros(obj.dimension());
  BruteforceSolution best;
  auto idx = first_subset(k);
  do {
    const auto solved = obj.restricted_minimize(idx, origin, tol, max_inner);
    const double value = obj.value(solved.point);
    if (value < best.value) {
      best.value = value;
      best.point = solved.point;
      best.support = idx;
    }
  } while (next_subset(idx, obj.dimension()));
  return best;
}

}  // namespace sparsethresh

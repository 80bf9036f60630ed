#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "sparsethresh/linalg.hpp"
#include "sparsethresh/metrics.hpp"
#include "sparsethresh/objectives.hpp"
#include "sparsethresh/operators.hpp"
#include "sparsethresh/random.hpp"

namespace sparsethresh {

enum class Algorithm { iht, sto_iht, nt, ntp, sto_nt, sto_ntp };
enum class GradientMode { chain_rule, paper_literal };
enum class SamplingLaw { uniform };

inline bool is_stochastic(Algorithm a) {
  return a == Algorithm::sto_iht || a == Algorithm::sto_nt || a == Algorithm::sto_ntp;
}
inline bool is_nt_family(Algorithm a) {
  return a == Algorithm::nt || a == Algorithm::ntp || a == Algorithm::sto_nt ||
         a == Algorithm::sto_ntp;
}
inline bool is_pursuit(Algorithm a) {
  return a == Algorithm::ntp || a == Algorithm::sto_ntp;
}

inline std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::iht: return "IHT";
    case Algorithm::sto_iht: return "StoIHT";
    case Algorithm::nt: return "NT";
    case Algorithm::ntp: return "NTP";
    case Algorithm::sto_nt: return "StoNT";
    case Algorithm::sto_ntp: return "StoNTP";
  }
  throw std::invalid_argument("unknown algorithm");
}

inline Algorithm algorithm_from_string(const std::string& s) {
  if (s == "IHT") return Algorithm::iht;
  if (s == "StoIHT") return Algorithm::sto_iht;
  if (s == "NT") return Algorithm::nt;
  if (s == "NTP") return Algorithm::ntp;
  if (s == "StoNT") return Algorithm::sto_nt;
  if (s == "StoNTP") return Algorithm::sto_ntp;
  throw std::invalid_argument("unknown algorithm: " + s);
}

inline std::string to_string(GradientMode m) {
  return m == GradientMode::chain_rule ? "chain_rule" : "paper_literal";
}

inline GradientMode gradient_mode_from_string(const std::string& s) {
  if (s == "chain_rule") return GradientMode::chain_rule;
  if (s == "paper_literal") return GradientMode::paper_literal;
  throw std::invalid_argument("unknown gradient mode: " + s);
}

/// Inner-solve settings for the pursuit (debiasing) step.
inline constexpr double kPursuitTol = 1e-8;
inline constexpr std::size_t kPursuitMaxInner = 500;

struct SolverConfig {
  Algorithm algorithm = Algorithm::ntp;
  std::size_t sparsity = 0;                    // k
  double step = 1.0;                           // gradient step size
  double alpha = 1.0;                          // selection regularization (NT family)
  std::size_t batch_size = 1;                  // stochastic algorithms
  SamplingLaw sampling = SamplingLaw::uniform;
  std::vector<double> probabilities;           // empty = uniform over components
  std::size_t max_iters = 150;
  double loss_tol = 1e-3;
  GradientMode gradient_mode = GradientMode::chain_rule;
  std::uint64_t seed = 0;
};

inline void validate(const SolverConfig& cfg, const ObjectiveModel& obj) {
  const std::size_t n = obj.dimension();
  const std::size_t m = obj.component_count();
  if (cfg.step <= 0.0) throw std::invalid_argument("SolverConfig: step must be positive");
  if (cfg.sparsity == 0 || cfg.sparsity > n) {
    throw std::invalid_argument("SolverConfig: need 1 <= sparsity <= dimension");
  }
  if (is_nt_family(cfg.algorithm) && cfg.alpha <= 0.0) {
    throw std::invalid_argument("SolverConfig: alpha must be positive");
  }
  if (is_stochastic(cfg.algorithm)) {
    if (cfg.batch_size == 0 || cfg.batch_size > m) {
      throw std::invalid_argument("SolverConfig: need 1 <= batch_size <= component count");
    }
  }
  if (!cfg.probabilities.empty()) {
    if (cfg.probabilities.size() != m) {
      throw std::invalid_argument("SolverConfig: probability vector length must match components");
    }
    double sum = 0.0;
    for (double p : cfg.probabilities) {
      if (p <= 0.0) throw std::invalid_argument("SolverConfig: probabilities must be positive");
      sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-9) {
      throw std::invalid_argument("SolverConfig: probabilities must sum to 1");
    }
  }
  if (cfg.loss_tol < 0.0) throw std::invalid_argument("SolverConfig: negative loss tolerance");
}

/// One gradient step. Deterministic algorithms use the full gradient; the
/// stochastic ones draw a batch without replacement and average the
/// importance-weighted component gradients
///   u = x - step * (1/|B|) * sum_{i in B} (1 / (M p_i)) grad component_i(x).
/// With uniform probabilities the weight is exactly 1, and a full batch
/// reduces to the deterministic step without touching the stream.
inline Vector gradient_step(const Vector& x, const ObjectiveModel& obj, const SolverConfig& cfg,
                            RandomStream& stream) {
  const std::size_t m = obj.component_count();
  const bool uniform = cfg.probabilities.empty();
  if (!is_stochastic(cfg.algorithm) || (uniform && cfg.batch_size == m)) {
    Vector u = x;
    add_scaled(u, obj.gradient(x), -cfg.step);
    return u;
  }
  auto batch = stream.sample_without_replacement(cfg.batch_size, m);
  std::sort(batch.begin(), batch.end());
  Vector u = x;
  if (uniform) {
    add_scaled(u, obj.batch_gradient(batch, x), -cfg.step);
    return u;
  }
  Vector acc(obj.dimension(), 0.0);
  for (std::size_t i : batch) {
    const double weight = 1.0 / (static_cast<double>(m) * cfg.probabilities[i]);
    add_scaled(acc, obj.component_gradient(i, x), weight);
  }
  add_scaled(u, acc, -cfg.step / static_cast<double>(batch.size()));
  return u;
}

struct NtSelection {
  BinaryVector keep;    // exactly k ones
  SupportSet support;   // supp(keep . u); may be smaller than k if u vanishes there
};

/// Natural-thresholding support selection. Rounds u to the nearest binary
/// vector, forms the selection gradient of the relaxed penalized objective,
/// and keeps the k most negative coordinates.
///
/// chain_rule applies the derivative of f(u . w) in w, i.e. multiplies by u;
/// paper_literal omits that factor.
inline NtSelection nt_select(const Vector& u, const ObjectiveModel& obj, std::size_t k,
                             double alpha, GradientMode mode) {
  if (k == 0 || k > u.size()) throw std::invalid_argument("nt_select: need 1 <= k <= dimension");
  const BinaryVector rounded = binary_round(u);
  const Vector grad_at_masked = obj.gradient(masked(u, rounded));
  Vector selection(u.size());
  const Vector penalty = binary_penalty_gradient(rounded);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double data_term =
        mode == GradientMode::chain_rule ? u[i] * grad_at_masked[i] : grad_at_masked[i];
    selection[i] = data_term + alpha * penalty[i];
  }
  NtSelection out;
  out.keep = natural_select(selection, k);
  out.support = support_of(masked(u, out.keep), 0.0);
  return out;
}

/// Final per-iteration update: hard thresholding for the IHT family, the
/// masked step for NT, and the support-restricted debiasing solve for NTP.
inline Vector solver_update(const Vector& u, const NtSelection& sel, const ObjectiveModel& obj,
                            const SolverConfig& cfg) {
  if (!is_nt_family(cfg.algorithm)) return hard_threshold(u, cfg.sparsity);
  Vector candidate = masked(u, sel.keep);
  if (!is_pursuit(cfg.algorithm)) return candidate;
  if (sel.support.empty()) return candidate;  // all selected coordinates of u are zero
  return obj.restricted_minimize(sel.support, candidate, kPursuitTol, kPursuitMaxInner).point;
}

struct TraceRecord {
  std::size_t iteration = 0;
  double time_s = 0.0;
  double loss = 0.0;
  double rel_error = std::numeric_limits<double>::quiet_NaN();
  bool support_correct = false;
};

/// Per-iteration records; iterations strictly increasing, time nondecreasing.
using Trace = std::vector<TraceRecord>;

struct RunResult {
  Vector x;
  Trace trace;
  bool converged = false;
  std::size_t iterations = 0;
};

/// Runs the configured algorithm from x = 0 until the loss criterion
/// (residual norm for least squares, objective value otherwise) falls to
/// loss_tol or max_iters iterations complete. The trace has one record per
/// iteration including iteration 0; wall time is measured from after setup
/// with a monotonic clock.
inline RunResult run(const ObjectiveModel& obj, const SolverConfig& cfg,
                     const Vector* truth = nullptr) {
  validate(cfg, obj);
  if (truth != nullptr && truth->size() != obj.dimension()) {
    throw std::invalid_argument("run: truth dimension mismatch");
  }
  RandomStream stream(cfg.seed);
  RunResult result;
  result.x = zeros(obj.dimension());
  result.trace.reserve(cfg.max_iters + 1);

  const auto start = std::chrono::steady_clock::now();
  const auto record = [&](std::size_t iteration) {
    TraceRecord rec;
    rec.iteration = iteration;
    rec.time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rec.loss = obj.loss(result.x);
    if (truth != nullptr) {
      rec.rel_error = relative_error(result.x, *truth);
      rec.support_correct = support_success(result.x, *truth);
    }
    result.trace.push_back(rec);
    return rec.loss;
  };

  if (record(0) <= cfg.loss_tol) {
    result.converged = true;
    return result;
  }
  for (std::size_t it = 1; it <= cfg.max_iters; ++it) {
    const Vector u = gradient_step(result.x, obj, cfg, stream);
    if (is_nt_family(cfg.algorithm)) {
      const NtSelection sel = nt_select(u, obj, cfg.sparsity, cfg.alpha, cfg.gradient_mode);
      result.x = solver_update(u, sel, obj, cfg);
    } else {
      result.x = solver_update(u, NtSelection{}, obj, cfg);
    }
    result.iterations = it;
    if (record(it) <= cfg.loss_tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace sparsethresh

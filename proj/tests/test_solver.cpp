#include "sparsethresh/solver.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "sparsethresh/generators.hpp"

namespace sparsethresh {
namespace {

const Matrix kIdentity3(3, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1});

SolverConfig base_config(Algorithm a, std::size_t k, double step) {
  SolverConfig cfg;
  cfg.algorithm = a;
  cfg.sparsity = k;
  cfg.step = step;
  return cfg;
}

TEST(AlgorithmNames, StringRoundTripAndFamilies) {
  for (auto a : {Algorithm::iht, Algorithm::sto_iht, Algorithm::nt, Algorithm::ntp,
                 Algorithm::sto_nt, Algorithm::sto_ntp}) {
    EXPECT_EQ(algorithm_from_string(to_string(a)), a);
  }
  EXPECT_THROW(algorithm_from_string("OMP"), std::invalid_argument);
  EXPECT_TRUE(is_stochastic(Algorithm::sto_ntp));
  EXPECT_FALSE(is_stochastic(Algorithm::ntp));
  EXPECT_TRUE(is_nt_family(Algorithm::nt));
  EXPECT_FALSE(is_nt_family(Algorithm::sto_iht));
  EXPECT_TRUE(is_pursuit(Algorithm::ntp));
  EXPECT_FALSE(is_pursuit(Algorithm::sto_nt));
  EXPECT_EQ(gradient_mode_from_string("chain_rule"), GradientMode::chain_rule);
  EXPECT_EQ(gradient_mode_from_string("paper_literal"), GradientMode::paper_literal);
  EXPECT_THROW(gradient_mode_from_string("exact"), std::invalid_argument);
}

TEST(ConfigValidation, RejectsInvalidSettings) {
  const LeastSquaresObjective obj(kIdentity3, {1, 0, 2});
  auto cfg = base_config(Algorithm::ntp, 2, 0.5);
  EXPECT_NO_THROW(validate(cfg, obj));

  auto bad = cfg;
  bad.step = 0.0;
  EXPECT_THROW(validate(bad, obj), std::invalid_argument);
  bad = cfg;
  bad.sparsity = 0;
  EXPECT_THROW(validate(bad, obj), std::invalid_argument);
  bad = cfg;
  bad.sparsity = 4;
  EXPECT_THROW(validate(bad, obj), std::invalid_argument);
  bad = cfg;
  bad.alpha = 0.0;
  EXPECT_THROW(validate(bad, obj), std::invalid_argument);
  bad = cfg;
  bad.algorithm = Algorithm::sto_ntp;
  bad.batch_size = 0;
  EXPECT_THROW(validate(bad, obj), std::invalid_argument);
  bad.batch_size = 4;  // exceeds component count 3
  EXPECT_THROW(validate(bad, obj), std::invalid_argument);
  bad = cfg;
  bad.algorithm = Algorithm::sto_ntp;
  bad.batch_size = 1;
  bad.probabilities = {0.5, 0.5};  // wrong length
  EXPECT_THROW(validate(bad, obj), std::invalid_argument);
  bad.probabilities = {0.5, 0.4, 0.2};  // does not sum to 1
  EXPECT_THROW(validate(bad, obj), std::invalid_argument);
  bad.probabilities = {0.5, 0.5, 0.0};  // zero entry
  EXPECT_THROW(validate(bad, obj), std::invalid_argument);
  bad.probabilities = {0.5, 0.25, 0.25};
  EXPECT_NO_THROW(validate(bad, obj));
  // IHT ignores alpha, so a nonpositive alpha passes there.
  bad = base_config(Algorithm::iht, 2, 0.5);
  bad.alpha = 0.0;
  EXPECT_NO_THROW(validate(bad, obj));
}

TEST(GradientStep, DeterministicHalfStepOnIdentity) {
  const LeastSquaresObjective obj(kIdentity3, {1, 0, 2});
  const auto cfg = base_config(Algorithm::nt, 2, 0.5);
  RandomStream stream(0);
  // x - (1/2) * 2(x - y) = y when x = 0.
  EXPECT_EQ(gradient_step(zeros(3), obj, cfg, stream), (Vector{1, 0, 2}));
}

TEST(GradientStep, FullBatchEqualsDeterministicWithoutTouchingStream) {
  const auto p = make_problem(ProblemType::linear, 10, 20, 3, 0.0, 7);
  const LeastSquaresObjective obj(p.matrix, p.target);
  const Vector x = hard_threshold(p.truth, 2);

  auto det_cfg = base_config(Algorithm::ntp, 3, 0.4);
  auto sto_cfg = base_config(Algorithm::sto_ntp, 3, 0.4);
  sto_cfg.batch_size = 10;  // = component count

  RandomStream det_stream(5);
  RandomStream sto_stream(5);
  EXPECT_EQ(gradient_step(x, obj, det_cfg, det_stream),
            gradient_step(x, obj, sto_cfg, sto_stream));
  // Neither call consumed randomness: the streams still agree draw for draw.
  EXPECT_EQ(det_stream.uniform(), sto_stream.uniform());
}

TEST(GradientStep, StochasticStepConsumesStreamAndStaysFinite) {
  const auto p = make_problem(ProblemType::linear, 10, 20, 3, 0.0, 8);
  const LeastSquaresObjective obj(p.matrix, p.target);
  auto cfg = base_config(Algorithm::sto_ntp, 3, 0.4);
  cfg.batch_size = 4;
  RandomStream s1(9);
  RandomStream s2(9);
  const Vector u1 = gradient_step(zeros(20), obj, cfg, s1);
  const Vector u2 = gradient_step(zeros(20), obj, cfg, s2);
  EXPECT_EQ(u1, u2);  // same seed, same draw
  EXPECT_TRUE(all_finite(u1));
  RandomStream untouched(9);
  EXPECT_NE(s1.uniform(), untouched.uniform());  // the batch draw advanced the stream
}

TEST(GradientStep, ExplicitUniformWeightsMatchImplicitUniform) {
  const auto p = make_problem(ProblemType::linear, 12, 20, 3, 0.0, 10);
  const LeastSquaresObjective obj(p.matrix, p.target);
  auto implicit_cfg = base_config(Algorithm::sto_ntp, 3, 0.4);
  implicit_cfg.batch_size = 5;
  auto explicit_cfg = implicit_cfg;
  explicit_cfg.probabilities.assign(12, 1.0 / 12.0);

  RandomStream s1(11);
  RandomStream s2(11);
  const Vector a = gradient_step(zeros(20), obj, implicit_cfg, s1);
  const Vector b = gradient_step(zeros(20), obj, explicit_cfg, s2);
  for (std::size_t j = 0; j < a.size(); ++j) {
    EXPECT_NEAR(a[j], b[j], 1e-14 * std::max(1.0, std::fabs(a[j])));
  }
}

TEST(NtSelect, HandWorkedIdentityExample) {
  // u = [1,0,2] already fits y exactly, so the data term vanishes and the
  // selection reduces to the binary-penalty gradient [-1, 1, -1]; the two
  // most negative coordinates are {0, 2}.
  const LeastSquaresObjective obj(kIdentity3, {1, 0, 2});
  const auto sel = nt_select({1, 0, 2}, obj, 2, 1.0, GradientMode::chain_rule);
  EXPECT_EQ(sel.keep, (BinaryVector{1, 0, 1}));
  EXPECT_EQ(sel.support, (SupportSet{0, 2}));
}

TEST(NtSelect, FullSparsitySelectsEverything) {
  const LeastSquaresObjective obj(kIdentity3, {1, 0, 2});
  const auto sel = nt_select({3, -1, 2}, obj, 3, 1.0, GradientMode::chain_rule);
  EXPECT_EQ(sel.keep, (BinaryVector{1, 1, 1}));
  EXPECT_EQ(sel.support, (SupportSet{0, 1, 2}));
}

TEST(NtSelect, RejectsBadSparsity) {
  const LeastSquaresObjective obj(kIdentity3, {1, 0, 2});
  EXPECT_THROW(nt_select({1, 0, 2}, obj, 0, 1.0, GradientMode::chain_rule),
               std::invalid_argument);
  EXPECT_THROW(nt_select({1, 0, 2}, obj, 4, 1.0, GradientMode::chain_rule),
               std::invalid_argument);
}

TEST(NtSelect, MatchesEnumerationOracleBothModes) {
  RandomStream stream(12);
  for (int rep = 0; rep < 50; ++rep) {
    const auto p = make_problem(ProblemType::linear, 6, 10, 3, 0.0, 100 + rep);
    const LeastSquaresObjective obj(p.matrix, p.target);
    Vector u(10);
    for (double& v : u) v = stream.normal();
    for (auto mode : {GradientMode::chain_rule, GradientMode::paper_literal}) {
      // Rebuild the selection gradient the way the contract defines it, then
      // compare the solver's pick against exhaustive enumeration.
      const BinaryVector rounded = binary_round(u);
      const Vector grad = obj.gradient(masked(u, rounded));
      Vector g(10);
      for (std::size_t i = 0; i < 10; ++i) {
        const double data = mode == GradientMode::chain_rule ? u[i] * grad[i] : grad[i];
        g[i] = data + (rounded[i] ? -1.0 : 1.0);
      }
      EXPECT_EQ(nt_select(u, obj, 3, 1.0, mode).keep, testing::oracle_min_dot_binary(g, 3));
    }
  }
}

TEST(SolverUpdate, MaskForNtAndHardThresholdForIht) {
  const LeastSquaresObjective obj(kIdentity3, {1, 0, 2});
  NtSelection sel;
  sel.keep = {1, 0, 1};
  sel.support = {0, 2};
  const Vector u{1, 5, 2};
  EXPECT_EQ(solver_update(u, sel, obj, base_config(Algorithm::nt, 2, 0.5)), (Vector{1, 0, 2}));
  EXPECT_EQ(solver_update(u, NtSelection{}, obj, base_config(Algorithm::iht, 2, 0.5)),
            hard_threshold(u, 2));
}

TEST(SolverUpdate, PursuitIsNoOpOnIdentityDesign) {
  const LeastSquaresObjective obj(kIdentity3, {1, 0, 2});
  NtSelection sel;
  sel.keep = {1, 0, 1};
  sel.support = {0, 2};
  const Vector u{1, 5, 2};
  const Vector nt = solver_update(u, sel, obj, base_config(Algorithm::nt, 2, 0.5));
  const Vector ntp = solver_update(u, sel, obj, base_config(Algorithm::ntp, 2, 0.5));
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(ntp[j], nt[j], 1e-12);
}

TEST(SolverUpdate, PursuitNeverIncreasesObjective) {
  const auto p = make_problem(ProblemType::linear, 6, 8, 3, 0.0, 13);
  const LeastSquaresObjective obj(p.matrix, p.target);
  RandomStream stream(14);
  for (int rep = 0; rep < 20; ++rep) {
    Vector u(8);
    for (double& v : u) v = stream.normal();
    const auto sel = nt_select(u, obj, 3, 1.0, GradientMode::chain_rule);
    const Vector nt = solver_update(u, sel, obj, base_config(Algorithm::nt, 3, 0.5));
    const Vector ntp = solver_update(u, sel, obj, base_config(Algorithm::ntp, 3, 0.5));
    EXPECT_LE(obj.value(ntp), obj.value(nt) + 1e-12);
  }
}

TEST(SolverUpdate, EmptySupportFallsBackToMaskedCandidate) {
  const LeastSquaresObjective obj(kIdentity3, {1, 0, 2});
  NtSelection sel;
  sel.keep = {1, 1, 0};
  sel.support = {};  // u vanishes on every kept coordinate
  EXPECT_EQ(solver_update({0, 0, 5}, sel, obj, base_config(Algorithm::ntp, 2, 0.5)),
            (Vector{0, 0, 0}));
}

TEST(Run, HandWorkedIdentityConvergesInOneIteration) {
  const LeastSquaresObjective obj(kIdentity3, {1, 0, 2});
  auto cfg = base_config(Algorithm::nt, 2, 0.5);
  const Vector truth{1, 0, 2};
  const auto result = run(obj, cfg, &truth);
  EXPECT_TRUE(result.converged);
  EXPECT_EQ(result.iterations, 1u);
  EXPECT_EQ(result.x, (Vector{1, 0, 2}));
  ASSERT_EQ(result.trace.size(), 2u);
  EXPECT_EQ(result.trace[0].iteration, 0u);
  EXPECT_DOUBLE_EQ(result.trace[0].loss, std::sqrt(5.0));
  EXPECT_DOUBLE_EQ(result.trace[0].rel_error, 1.0);
  EXPECT_FALSE(result.trace[0].support_correct);
  EXPECT_EQ(result.trace[1].iteration, 1u);
  EXPECT_EQ(result.trace[1].loss, 0.0);
  EXPECT_EQ(result.trace[1].rel_error, 0.0);
  EXPECT_TRUE(result.trace[1].support_correct);
  EXPECT_GE(result.trace[1].time_s, result.trace[0].time_s);
}

TEST(Run, FullSparsityPursuitSolvesUnconstrainedLeastSquares) {
  const Matrix A = [] {
    RandomStream stream(15);
    return gen_gaussian_matrix(8, 3, NormalizeMode::none, stream);
  }();
  Vector y(8);
  {
    RandomStream stream(16);
    for (double& v : y) v = stream.normal();
  }
  const LeastSquaresObjective obj(A, y);
  auto cfg = base_config(Algorithm::ntp, 3, 0.1);
  cfg.max_iters = 1;
  const auto result = run(obj, cfg);
  const Vector expected = testing::oracle_restricted_lsq(A, y, {0, 1, 2});
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(result.x[j], expected[j], 1e-8);
}

TEST(Run, ZeroIterationBudgetRecordsOnlyStart) {
  const LeastSquaresObjective obj(kIdentity3, {1, 0, 2});
  auto cfg = base_config(Algorithm::ntp, 2, 0.5);
  cfg.max_iters = 0;
  const auto result = run(obj, cfg);
  EXPECT_FALSE(result.converged);
  EXPECT_EQ(result.iterations, 0u);
  ASSERT_EQ(result.trace.size(), 1u);
  EXPECT_EQ(result.trace[0].iteration, 0u);
}

TEST(Run, AlreadyConvergedAtStart) {
  const LeastSquaresObjective obj(kIdentity3, {0, 0, 0});
  const auto result = run(obj, base_config(Algorithm::ntp, 2, 0.5));
  EXPECT_TRUE(result.converged);
  EXPECT_EQ(result.iterations, 0u);
  EXPECT_EQ(result.trace.size(), 1u);
}

TEST(Run, TruthWiring) {
  const LeastSquaresObjective obj(kIdentity3, {1, 0, 2});
  auto cfg = base_config(Algorithm::nt, 2, 0.5);
  const auto no_truth = run(obj, cfg);
  EXPECT_TRUE(std::isnan(no_truth.trace[0].rel_error));
  EXPECT_FALSE(no_truth.trace[0].support_correct);
  const Vector wrong_size{1, 0};
  EXPECT_THROW(run(obj, cfg, &wrong_size), std::invalid_argument);
}

TEST(Run, InvalidConfigRejectedBeforeIterating) {
  const LeastSquaresObjective obj(kIdentity3, {1, 0, 2});
  auto cfg = base_config(Algorithm::ntp, 0, 0.5);
  EXPECT_THROW(run(obj, cfg), std::invalid_argument);
}

TEST(Run, IdenticalSeedsGiveIdenticalRuns) {
  const auto p = make_problem(ProblemType::linear, 40, 80, 4, 0.0, 17);
  const LeastSquaresObjective obj(p.matrix, p.target);
  auto cfg = base_config(Algorithm::sto_ntp, 4, 0.25);
  cfg.batch_size = 8;
  cfg.seed = 3;
  cfg.max_iters = 40;
  const auto r1 = run(obj, cfg, &p.truth);
  const auto r2 = run(obj, cfg, &p.truth);
  EXPECT_EQ(r1.x, r2.x);
  ASSERT_EQ(r1.trace.size(), r2.trace.size());
  for (std::size_t t = 0; t < r1.trace.size(); ++t) {
    EXPECT_EQ(r1.trace[t].loss, r2.trace[t].loss);
    EXPECT_EQ(r1.trace[t].rel_error, r2.trace[t].rel_error);
    EXPECT_EQ(r1.trace[t].support_correct, r2.trace[t].support_correct);
  }
}

TEST(Run, FullBatchStochasticReproducesDeterministicTrace) {
  const auto p = make_problem(ProblemType::linear, 30, 60, 4, 0.0, 18);
  const LeastSquaresObjective obj(p.matrix, p.target);
  for (auto [det, sto] : {std::pair{Algorithm::nt, Algorithm::sto_nt},
                          std::pair{Algorithm::ntp, Algorithm::sto_ntp}}) {
    auto det_cfg = base_config(det, 4, 0.25);
    det_cfg.max_iters = 30;
    auto sto_cfg = det_cfg;
    sto_cfg.algorithm = sto;
    sto_cfg.batch_size = 30;  // full batch
    const auto dr = run(obj, det_cfg, &p.truth);
    const auto sr = run(obj, sto_cfg, &p.truth);
    EXPECT_EQ(dr.x, sr.x);
    ASSERT_EQ(dr.trace.size(), sr.trace.size());
    for (std::size_t t = 0; t < dr.trace.size(); ++t) {
      EXPECT_EQ(dr.trace[t].loss, sr.trace[t].loss);
      EXPECT_EQ(dr.trace[t].rel_error, sr.trace[t].rel_error);
    }
  }
}

TEST(Run, StochasticIhtRecoversEasyInstance) {
  const auto p = make_problem(ProblemType::linear, 100, 200, 5, 0.0, 19);
  const LeastSquaresObjective obj(p.matrix, p.target);
  auto cfg = base_config(Algorithm::sto_iht, 5, 0.15);
  cfg.batch_size = 10;
  cfg.seed = 1;
  const auto result = run(obj, cfg, &p.truth);
  EXPECT_TRUE(result.converged);
  EXPECT_TRUE(result.trace.back().support_correct);
  EXPECT_LT(result.trace.back().rel_error, 1e-3);
}

TEST(Run, PursuitRecoversFlatAmplitudeSignal) {
  // Flat-magnitude signals are the regime where the selection rule shines:
  // every truth entry clears the rounding threshold once the iterate is close.
  RandomStream stream(20);
  const Matrix A = gen_gaussian_matrix(100, 200, NormalizeMode::columns, stream);
  Vector truth(200, 0.0);
  const auto support = stream.sample_without_replacement(5, 200);
  for (std::size_t idx : support) truth[idx] = 1.0 / std::sqrt(5.0);
  const Vector y = matvec(A, truth);
  const LeastSquaresObjective obj(A, y);

  auto ntp_cfg = base_config(Algorithm::ntp, 5, 0.25);
  const auto ntp = run(obj, ntp_cfg, &truth);
  EXPECT_TRUE(ntp.converged);
  EXPECT_TRUE(ntp.trace.back().support_correct);

  auto sto_cfg = base_config(Algorithm::sto_ntp, 5, 0.25);
  sto_cfg.batch_size = 10;
  sto_cfg.seed = 2;
  const auto sto = run(obj, sto_cfg, &truth);
  EXPECT_TRUE(sto.converged);
  EXPECT_TRUE(sto.trace.back().support_correct);
}

}  // namespace
}  // namespace sparsethresh

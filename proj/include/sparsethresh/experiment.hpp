#pragma once

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "sparsethresh/generators.hpp"
#include "sparsethresh/metrics.hpp"
#include "sparsethresh/problem_io.hpp"
#include "sparsethresh/solver.hpp"

namespace sparsethresh {

// ---------------------------------------------------------------------------
// CSV primitives
// ---------------------------------------------------------------------------

/// Shortest decimal form that parses back to the identical double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// Wall-clock seconds with nanosecond resolution.
inline std::string format_time(double seconds) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9f", seconds);
  return std::string(buf);
}

inline double parse_double(const std::string& s, const char* where) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument(std::string(where) + ": bad real value \"" + s + "\"");
  }
  return v;
}

inline std::size_t parse_count(const std::string& s, const char* where) {
  std::size_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument(std::string(where) + ": bad count \"" + s + "\"");
  }
  return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(current);
  return fields;
}

// ---------------------------------------------------------------------------
// Trace CSV
// ---------------------------------------------------------------------------

inline constexpr const char* kTraceHeader = "iteration,time_s,loss,rel_error,support_correct";

inline void write_trace_csv(std::ostream& out, const Trace& trace) {
  out << kTraceHeader << '\n';
  for (const TraceRecord& r : trace) {
    out << r.iteration << ',' << format_time(r.time_s) << ',' << format_double(r.loss) << ','
        << format_double(r.rel_error) << ',' << (r.support_correct ? 1 : 0) << '\n';
  }
}

inline Trace read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) {
    throw std::invalid_argument("trace csv: bad or missing header");
  }
  Trace trace;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 5) throw std::invalid_argument("trace csv: expected 5 fields");
    TraceRecord r;
    r.iteration = parse_count(fields[0], "trace csv");
    r.time_s = parse_double(fields[1], "trace csv");
    r.loss = parse_double(fields[2], "trace csv");
    r.rel_error = fields[3] == "nan" ? std::numeric_limits<double>::quiet_NaN()
                                     : parse_double(fields[3], "trace csv");
    r.support_correct = parse_count(fields[4], "trace csv") != 0;
    trace.push_back(r);
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Sweep CSV
// ---------------------------------------------------------------------------

/// One grid point of a success-rate sweep. The step size is emitted under the
/// column name "lambda" (its conventional symbol).
struct SweepResult {
  Algorithm algorithm = Algorithm::sto_ntp;
  double alpha = 1.0;
  double step = 1.0;
  std::size_t batch_size = 1;
  std::size_t trials = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;
};

inline constexpr const char* kSweepHeader =
    "algorithm,alpha,lambda,batch_size,trials,successes,success_rate";

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepResult>& results) {
  out << kSweepHeader << '\n';
  for (const SweepResult& r : results) {
    out << to_string(r.algorithm) << ',' << format_double(r.alpha) << ',' << format_double(r.step)
        << ',' << r.batch_size << ',' << r.trials << ',' << r.successes << ','
        << format_double(r.success_rate) << '\n';
  }
}

inline std::vector<SweepResult> read_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kSweepHeader) {
    throw std::invalid_argument("sweep csv: bad or missing header");
  }
  std::vector<SweepResult> results;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 7) throw std::invalid_argument("sweep csv: expected 7 fields");
    SweepResult r;
    r.algorithm = algorithm_from_string(fields[0]);
    r.alpha = parse_double(fields[1], "sweep csv");
    r.step = parse_double(fields[2], "sweep csv");
    r.batch_size = parse_count(fields[3], "sweep csv");
    r.trials = parse_count(fields[4], "sweep csv");
    r.successes = parse_count(fields[5], "sweep csv");
    r.success_rate = parse_double(fields[6], "sweep csv");
    results.push_back(r);
  }
  return results;
}

// ---------------------------------------------------------------------------
// Config blocks
// ---------------------------------------------------------------------------

struct ProblemBlock {
  ProblemType type = ProblemType::linear;
  std::size_t rows = 0;      // measurements / samples (m)
  std::size_t cols = 0;      // signal dimension (n)
  std::size_t sparsity = 0;  // ground-truth support size (k)
  double noise_std = 0.0;
  std::uint64_t seed = 0;
};

struct RunBlock {
  std::size_t trials = 1;
  std::string output_dir = ".";
  std::string name = "experiment";
};

struct SweepBlock {
  std::vector<std::string> algorithms;    // empty = solver block's algorithm
  std::vector<double> alphas;             // empty = solver block's alpha
  std::vector<double> steps;              // empty = solver block's step
  std::vector<std::size_t> batch_sizes;   // empty = solver block's batch_size
  std::size_t trials = 1;
  std::string output_file = "sweep.csv";
};

struct ExperimentConfig {
  ProblemBlock problem;
  SolverConfig solver;
  std::vector<double> alpha_grid;  // optional: one trace set per value
  std::vector<double> step_grid;   // optional: one trace set per value
  RunBlock run;
};

struct SweepConfig {
  ProblemBlock problem;
  SolverConfig solver;
  SweepBlock sweep;
};

inline void validate(const ProblemBlock& p) {
  if (p.rows == 0 || p.cols == 0) throw std::invalid_argument("problem: zero dimension");
  if (p.sparsity == 0 || p.sparsity > p.cols) {
    throw std::invalid_argument("problem: need 1 <= k <= n");
  }
  if (p.noise_std < 0.0) throw std::invalid_argument("problem: negative noise_std");
}

// ---------------------------------------------------------------------------
// Config JSON
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const ProblemBlock& p) {
  return {{"type", to_string(p.type)}, {"m", p.rows},
          {"n", p.cols},               {"k", p.sparsity},
          {"noise_std", p.noise_std},  {"seed", p.seed}};
}

inline ProblemBlock problem_block_from_json(const nlohmann::json& j) {
  static constexpr const char* kWhere = "config.problem";
  reject_unknown_keys(j, {"type", "m", "n", "k", "noise_std", "seed"}, kWhere);
  ProblemBlock p;
  p.type = problem_type_from_string(require_key(j, "type", kWhere).get<std::string>());
  p.rows = require_key(j, "m", kWhere).get<std::size_t>();
  p.cols = require_key(j, "n", kWhere).get<std::size_t>();
  p.sparsity = require_key(j, "k", kWhere).get<std::size_t>();
  p.noise_std = j.value("noise_std", 0.0);
  p.seed = j.value("seed", std::uint64_t{0});
  validate(p);
  return p;
}

/// The solver block omits the sparsity level; it is taken from the problem
/// block when a run is assembled.
inline nlohmann::json solver_block_to_json(const SolverConfig& s,
                                           const std::vector<double>& alpha_grid = {},
                                           const std::vector<double>& step_grid = {}) {
  nlohmann::json j{{"algorithm", to_string(s.algorithm)},
                   {"step", s.step},
                   {"alpha", s.alpha},
                   {"batch_size", s.batch_size},
                   {"sampling", "uniform"},
                   {"max_iters", s.max_iters},
                   {"loss_tol", s.loss_tol},
                   {"gradient_mode", to_string(s.gradient_mode)},
                   {"seed", s.seed}};
  if (!s.probabilities.empty()) j["probabilities"] = s.probabilities;
  if (!alpha_grid.empty()) j["alpha_grid"] = alpha_grid;
  if (!step_grid.empty()) j["step_grid"] = step_grid;
  return j;
}

inline SolverConfig solver_block_from_json(const nlohmann::json& j,
                                           std::vector<double>* alpha_grid = nullptr,
                                           std::vector<double>* step_grid = nullptr) {
  static constexpr const char* kWhere = "config.solver";
  reject_unknown_keys(j,
                      {"algorithm", "step", "alpha", "batch_size", "sampling", "probabilities",
                       "max_iters", "loss_tol", "gradient_mode", "seed", "alpha_grid", "step_grid"},
                      kWhere);
  SolverConfig s;
  s.algorithm = algorithm_from_string(require_key(j, "algorithm", kWhere).get<std::string>());
  s.step = require_key(j, "step", kWhere).get<double>();
  s.alpha = j.value("alpha", 1.0);
  s.batch_size = j.value("batch_size", std::size_t{1});
  if (j.contains("sampling") && j.at("sampling").get<std::string>() != "uniform") {
    throw std::invalid_argument("config.solver: unknown sampling law");
  }
  if (j.contains("probabilities")) {
    s.probabilities = j.at("probabilities").get<std::vector<double>>();
  }
  s.max_iters = j.value("max_iters", std::size_t{150});
  s.loss_tol = j.value("loss_tol", 1e-3);
  s.gradient_mode = gradient_mode_from_string(j.value("gradient_mode", std::string("chain_rule")));
  s.seed = j.value("seed", std::uint64_t{0});
  if (alpha_grid != nullptr && j.contains("alpha_grid")) {
    *alpha_grid = j.at("alpha_grid").get<std::vector<double>>();
  }
  if (step_grid != nullptr && j.contains("step_grid")) {
    *step_grid = j.at("step_grid").get<std::vector<double>>();
  }
  return s;
}

inline nlohmann::json to_json(const RunBlock& r) {
  return {{"trials", r.trials}, {"output_dir", r.output_dir}, {"name", r.name}};
}

inline RunBlock run_block_from_json(const nlohmann::json& j) {
  static constexpr const char* kWhere = "config.run";
  reject_unknown_keys(j, {"trials", "output_dir", "name"}, kWhere);
  RunBlock r;
  r.trials = require_key(j, "trials", kWhere).get<std::size_t>();
  r.output_dir = j.value("output_dir", std::string("."));
  r.name = j.value("name", std::string("experiment"));
  if (r.trials == 0) throw std::invalid_argument("config.run: need trials >= 1");
  if (r.name.empty()) throw std::invalid_argument("config.run: empty name");
  return r;
}

inline nlohmann::json to_json(const SweepBlock& s) {
  return {{"algorithms", s.algorithms}, {"alphas", s.alphas},
          {"steps", s.steps},           {"batch_sizes", s.batch_sizes},
          {"trials", s.trials},         {"output_file", s.output_file}};
}

inline SweepBlock sweep_block_from_json(const nlohmann::json& j) {
  static constexpr const char* kWhere = "config.sweep";
  reject_unknown_keys(j, {"algorithms", "alphas", "steps", "batch_sizes", "trials", "output_file"},
                      kWhere);
  SweepBlock s;
  if (j.contains("algorithms")) s.algorithms = j.at("algorithms").get<std::vector<std::string>>();
  for (const std::string& name : s.algorithms) algorithm_from_string(name);  // validate early
  if (j.contains("alphas")) s.alphas = j.at("alphas").get<std::vector<double>>();
  if (j.contains("steps")) s.steps = j.at("steps").get<std::vector<double>>();
  if (j.contains("batch_sizes")) {
    s.batch_sizes = j.at("batch_sizes").get<std::vector<std::size_t>>();
  }
  s.trials = require_key(j, "trials", kWhere).get<std::size_t>();
  s.output_file = j.value("output_file", std::string("sweep.csv"));
  if (s.trials == 0) throw std::invalid_argument("config.sweep: need trials >= 1");
  if (s.output_file.empty()) throw std::invalid_argument("config.sweep: empty output_file");
  return s;
}

inline nlohmann::json to_json(const ExperimentConfig& c) {
  return {{"problem", to_json(c.problem)},
          {"solver", solver_block_to_json(c.solver, c.alpha_grid, c.step_grid)},
          {"run", to_json(c.run)}};
}

inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  reject_unknown_keys(j, {"problem", "solver", "run"}, "config");
  ExperimentConfig c;
  c.problem = problem_block_from_json(require_key(j, "problem", "config"));
  c.solver = solver_block_from_json(require_key(j, "solver", "config"), &c.alpha_grid, &c.step_grid);
  c.run = run_block_from_json(require_key(j, "run", "config"));
  return c;
}

inline nlohmann::json to_json(const SweepConfig& c) {
  return {{"problem", to_json(c.problem)},
          {"solver", solver_block_to_json(c.solver)},
          {"sweep", to_json(c.sweep)}};
}

inline SweepConfig sweep_config_from_json(const nlohmann::json& j) {
  reject_unknown_keys(j, {"problem", "solver", "sweep"}, "config");
  SweepConfig c;
  c.problem = problem_block_from_json(require_key(j, "problem", "config"));
  c.solver = solver_block_from_json(require_key(j, "solver", "config"));
  c.sweep = sweep_block_from_json(require_key(j, "sweep", "config"));
  return c;
}

inline nlohmann::json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("malformed JSON in " + path.string() + ": " + e.what());
  }
  return j;
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

struct TrialOutcome {
  RunResult result;
  bool success = false;  // exact support recovery at termination
  double final_loss = std::numeric_limits<double>::quiet_NaN();
  double misclassification = std::numeric_limits<double>::quiet_NaN();  // classification only
};

/// One seeded trial: instance seeds and solver seeds both advance with the
/// trial index so trials are independent yet reproducible.
inline TrialOutcome run_single_trial(const ProblemBlock& pb, const SolverConfig& base,
                                     std::size_t trial) {
  const ProblemInstance problem =
      make_problem(pb.type, pb.rows, pb.cols, pb.sparsity, pb.noise_std, pb.seed + trial);
  const auto objective = make_objective(problem);
  SolverConfig cfg = base;
  cfg.sparsity = pb.sparsity;
  cfg.seed = base.seed + trial;
  TrialOutcome out;
  out.result = run(*objective, cfg, &problem.truth);
  out.success = support_success(out.result.x, problem.truth);
  out.final_loss = out.result.trace.back().loss;
  if (pb.type != ProblemType::linear) {
    out.misclassification = misclassification_rate(problem.matrix, problem.target, out.result.x);
  }
  return out;
}

/// Runs every (grid value, trial) combination and writes one trace CSV per
/// trial into run.output_dir. File names carry the grid value when a grid is
/// configured: <name>[_alpha<v>][_lambda<v>]_trial<NNN>.csv.
inline std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& config) {
  validate(config.problem);
  if (config.run.trials == 0) throw std::invalid_argument("run_experiment: need trials >= 1");
  const std::filesystem::path dir(config.run.output_dir);
  std::filesystem::create_directories(dir);

  const std::vector<double> alphas =
      config.alpha_grid.empty() ? std::vector<double>{config.solver.alpha} : config.alpha_grid;
  const std::vector<double> steps =
      config.step_grid.empty() ? std::vector<double>{config.solver.step} : config.step_grid;

  std::vector<std::filesystem::path> written;
  for (double alpha : alphas) {
    for (double step : steps) {
      SolverConfig solver = config.solver;
      solver.alpha = alpha;
      solver.step = step;
      for (std::size_t trial = 0; trial < config.run.trials; ++trial) {
        const TrialOutcome outcome = run_single_trial(config.problem, solver, trial);
        std::string stem = config.run.name;
        if (!config.alpha_grid.empty()) stem += "_alpha" + format_double(alpha);
        if (!config.step_grid.empty()) stem += "_lambda" + format_double(step);
        char suffix[32];
        std::snprintf(suffix, sizeof(suffix), "_trial%03zu.csv", trial);
        const std::filesystem::path path = dir / (stem + suffix);
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
        write_trace_csv(out, outcome.result.trace);
        if (!out) throw std::runtime_error("write failed: " + path.string());
        written.push_back(path);
      }
    }
  }
  return written;
}

/// Worker count for sweeps: the SPARSETHRESH_THREADS environment variable
/// caps parallelism, 0 or unset meaning the hardware concurrency.
inline std::size_t sweep_thread_count() {
  std::size_t configured = 0;
  if (const char* env = std::getenv("SPARSETHRESH_THREADS")) {
    try {
      configured = parse_count(env, "SPARSETHRESH_THREADS");
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument("SPARSETHRESH_THREADS: not a count");
    }
  }
  if (configured == 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    configured = hw == 0 ? 1 : hw;
  }
  return configured;
}

/// Evaluates the success rate at every grid point. Rows come out in grid
/// order (algorithm-major, then alpha, step, batch size) regardless of how
/// many worker threads ran them; a trial succeeds on exact support recovery.
inline std::vector<SweepResult> run_sweep(const SweepConfig& config) {
  validate(config.problem);
  if (config.sweep.trials == 0) throw std::invalid_argument("run_sweep: need trials >= 1");

  std::vector<Algorithm> algorithms;
  if (config.sweep.algorithms.empty()) {
    algorithms.push_back(config.solver.algorithm);
  } else {
    for (const std::string& name : config.sweep.algorithms) {
      algorithms.push_back(algorithm_from_string(name));
    }
  }
  const std::vector<double> alphas = config.sweep.alphas.empty()
                                         ? std::vector<double>{config.solver.alpha}
                                         : config.sweep.alphas;
  const std::vector<double> steps =
      config.sweep.steps.empty() ? std::vector<double>{config.solver.step} : config.sweep.steps;
  const std::vector<std::size_t> batch_sizes = config.sweep.batch_sizes.empty()
                                                   ? std::vector<std::size_t>{config.solver.batch_size}
                                                   : config.sweep.batch_sizes;

  std::vector<SweepResult> results;
  for (Algorithm algorithm : algorithms) {
    for (double alpha : alphas) {
      for (double step : steps) {
        for (std::size_t bs : batch_sizes) {
          SweepResult r;
          r.algorithm = algorithm;
          r.alpha = alpha;
          r.step = step;
          r.batch_size = bs;
          r.trials = config.sweep.trials;
          results.push_back(r);
        }
      }
    }
  }

  const auto evaluate = [&](SweepResult& r) {
    SolverConfig solver = config.solver;
    solver.algorithm = r.algorithm;
    solver.alpha = r.alpha;
    solver.step = r.step;
    solver.batch_size = r.batch_size;
    std::size_t successes = 0;
    for (std::size_t trial = 0; trial < r.trials; ++trial) {
      if (run_single_trial(config.problem, solver, trial).success) ++successes;
    }
    r.successes = successes;
    r.success_rate = static_cast<double>(successes) / static_cast<double>(r.trials);
  };

  const std::size_t threads = std::min(sweep_thread_count(), results.size());
  if (threads <= 1) {
    for (SweepResult& r : results) evaluate(r);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < results.size(); i = next.fetch_add(1)) {
        evaluate(results[i]);
      }
    });
  }
  for (std::thread& worker : pool) worker.join();
  return results;
}

}  // namespace sparsethresh

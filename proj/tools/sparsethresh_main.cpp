// Command-line front end: run one experiment, sweep a parameter grid,
// generate a problem instance, or self-check the numerical core.
//
// Exit codes: 0 success, 2 invalid configuration or usage, 1 runtime failure.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sparsethresh/sparsethresh.hpp"

namespace st = sparsethresh;

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;      // overrides problem + solver seeds
  std::optional<std::string> out_dir;     // overrides the output directory
  std::optional<std::string> algorithm;   // overrides the algorithm
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool config_required) {
  auto* config = cmd->add_option("--config", opts.config_path, "JSON configuration file");
  if (config_required) config->required();
  cmd->add_option("--seed", opts.seed, "override the problem and solver seeds");
  cmd->add_option("--out", opts.out_dir, "override the output directory");
  cmd->add_option("--algorithm", opts.algorithm, "override the algorithm name");
}

int cmd_run(const CommonOptions& opts) {
  st::ExperimentConfig config =
      st::experiment_config_from_json(st::load_json_file(opts.config_path));
  if (opts.algorithm) config.solver.algorithm = st::algorithm_from_string(*opts.algorithm);
  if (opts.seed) {
    config.problem.seed = *opts.seed;
    config.solver.seed = *opts.seed;
  }
  if (opts.out_dir) config.run.output_dir = *opts.out_dir;
  const auto written = st::run_experiment(config);
  for (const auto& path : written) std::cout << path.string() << '\n';
  std::cout << "wrote " << written.size() << " trace file(s)\n";
  return 0;
}

int cmd_sweep(const CommonOptions& opts) {
  st::SweepConfig config = st::sweep_config_from_json(st::load_json_file(opts.config_path));
  if (opts.algorithm) config.sweep.algorithms = {*opts.algorithm};
  if (opts.seed) {
    config.problem.seed = *opts.seed;
    config.solver.seed = *opts.seed;
  }
  std::filesystem::path out_file(config.sweep.output_file);
  if (opts.out_dir) out_file = std::filesystem::path(*opts.out_dir) / out_file.filename();
  const auto results = st::run_sweep(config);
  if (out_file.has_parent_path()) std::filesystem::create_directories(out_file.parent_path());
  std::ofstream out(out_file);
  if (!out) throw std::runtime_error("cannot open for writing: " + out_file.string());
  st::write_sweep_csv(out, results);
  if (!out) throw std::runtime_error("write failed: " + out_file.string());
  std::cout << out_file.string() << '\n';
  std::cout << "wrote " << results.size() << " grid point(s)\n";
  return 0;
}

int cmd_gen(const CommonOptions& opts) {
  const nlohmann::json j = st::load_json_file(opts.config_path);
  // Accept either a bare problem block or a full config containing one.
  const nlohmann::json& block = j.contains("problem") ? j.at("problem") : j;
  st::ProblemBlock pb = st::problem_block_from_json(block);
  if (opts.seed) pb.seed = *opts.seed;
  const st::ProblemInstance problem =
      st::make_problem(pb.type, pb.rows, pb.cols, pb.sparsity, pb.noise_std, pb.seed);
  char name[128];
  std::snprintf(name, sizeof(name), "problem_%s_m%zu_n%zu_k%zu_seed%llu.json",
                st::to_string(pb.type).c_str(), pb.rows, pb.cols, pb.sparsity,
                static_cast<unsigned long long>(pb.seed));
  const std::filesystem::path dir(opts.out_dir.value_or("."));
  std::filesystem::create_directories(dir);
  const std::filesystem::path path = dir / name;
  st::save_problem(problem, path);
  std::cout << path.string() << '\n';
  return 0;
}

bool report(bool ok, const std::string& message) {
  std::cout << (ok ? "[ok]   " : "[FAIL] ") << message << '\n';
  return ok;
}

// Self-check battery: analytic gradients against finite differences,
// thresholding/selection against exhaustive enumeration, stochastic scaling
// against the exact full gradient, and the RIP diagnostic on a small matrix.
int cmd_check(const CommonOptions& opts) {
  const std::uint64_t seed = opts.seed.value_or(12345);
  bool all_ok = true;

  {  // gradients of all three objectives at random points
    const st::ProblemType types[] = {st::ProblemType::linear, st::ProblemType::logistic,
                                     st::ProblemType::svm};
    for (st::ProblemType type : types) {
      const auto problem = st::make_problem(type, 12, 20, 3, 0.0, seed);
      const auto objective = st::make_objective(problem);
      st::RandomStream stream(seed + 1);
      double worst = 0.0;
      std::size_t checked = 0;
      while (checked < 5) {
        st::Vector x(problem.matrix.cols());
        for (double& v : x) v = stream.normal();
        if (objective->kink_adjacent(x, 1e-4)) continue;
        worst = std::max(worst, st::gradient_fd_check(*objective, x, 1e-6));
        ++checked;
      }
      char line[128];
      std::snprintf(line, sizeof(line), "%s gradient vs finite differences: worst deviation %.2e",
                    st::to_string(type).c_str(), worst);
      all_ok &= report(worst < 1e-5, line);
    }
  }

  {  // hard thresholding equals the exhaustive best k-term approximation
    st::RandomStream stream(seed + 2);
    bool ok = true;
    for (int rep = 0; rep < 200 && ok; ++rep) {
      st::Vector v(10);
      for (double& entry : v) entry = stream.normal();
      const std::size_t k = 1 + stream.uniform_index(4);
      ok = st::hard_threshold(v, k) == st::bruteforce_best_kterm(v, k);
    }
    all_ok &= report(ok, "hard thresholding equals exhaustive best k-term selection (200 cases)");
  }

  {  // natural selection equals the exhaustive argmin, both gradient modes
    st::RandomStream stream(seed + 3);
    bool ok = true;
    for (int rep = 0; rep < 100 && ok; ++rep) {
      const auto problem = st::make_problem(st::ProblemType::linear, 8, 10, 3, 0.0, seed + rep);
      const auto objective = st::make_objective(problem);
      st::Vector u(10);
      for (double& entry : u) entry = stream.normal();
      const std::size_t k = 1 + stream.uniform_index(4);
      const double alpha = 0.5 + stream.uniform();
      for (st::GradientMode mode :
           {st::GradientMode::chain_rule, st::GradientMode::paper_literal}) {
        const auto rounded = st::binary_round(u);
        const st::Vector grad = objective->gradient(st::masked(u, rounded));
        const st::Vector penalty = st::binary_penalty_gradient(rounded);
        st::Vector g(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) {
          const double data = mode == st::GradientMode::chain_rule ? u[i] * grad[i] : grad[i];
          g[i] = data + alpha * penalty[i];
        }
        const auto selection = st::nt_select(u, *objective, k, alpha, mode);
        ok = ok && selection.keep == st::bruteforce_min_dot_support(g, k);
      }
    }
    all_ok &= report(ok, "selection step equals exhaustive argmin (100 cases, both modes)");
  }

  {  // mean of singleton stochastic gradients reproduces the full gradient
    const auto problem = st::make_problem(st::ProblemType::linear, 15, 12, 3, 0.0, seed + 4);
    const auto objective = st::make_objective(problem);
    st::RandomStream stream(seed + 5);
    st::Vector x(12);
    for (double& v : x) v = stream.normal();
    const st::Vector full = objective->gradient(x);
    st::Vector mean(12, 0.0);
    for (std::size_t i = 0; i < objective->component_count(); ++i) {
      st::add_scaled(mean, objective->batch_gradient({i}, x), 1.0);
    }
    for (double& v : mean) v /= static_cast<double>(objective->component_count());
    double worst = 0.0;
    for (std::size_t i = 0; i < mean.size(); ++i) {
      worst = std::max(worst, std::fabs(mean[i] - full[i]));
    }
    char line[128];
    std::snprintf(line, sizeof(line),
                  "mean singleton stochastic gradient vs full gradient: max gap %.2e", worst);
    all_ok &= report(worst < 1e-12, line);
  }

  {  // restricted-isometry diagnostic on a small unit-column matrix
    st::RandomStream stream(seed + 6);
    const st::Matrix A = st::gen_gaussian_matrix(20, 40, st::NormalizeMode::columns, stream);
    const double d1 = st::rip_constant_bruteforce(A, 1);
    const double d2 = st::rip_constant_bruteforce(A, 2);
    const double d3 = st::rip_constant_bruteforce(A, 3);
    char line[160];
    std::snprintf(line, sizeof(line),
                  "restricted isometry constants monotone: d1=%.3e <= d2=%.4f <= d3=%.4f", d1, d2,
                  d3);
    all_ok &= report(d1 <= d2 + 1e-12 && d2 <= d3 + 1e-12 && d1 < 1e-9, line);
  }

  std::cout << (all_ok ? "self-check passed\n" : "self-check FAILED\n");
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse-signal recovery: thresholding solvers and experiment harness"};
  app.require_subcommand(1);

  CommonOptions run_opts, sweep_opts, gen_opts, check_opts;
  CLI::App* run_cmd = app.add_subcommand("run", "run one experiment, writing per-trial traces");
  add_common(run_cmd, run_opts, true);
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "evaluate success rates over a parameter grid");
  add_common(sweep_cmd, sweep_opts, true);
  CLI::App* gen_cmd = app.add_subcommand("gen", "generate a problem instance file");
  add_common(gen_cmd, gen_opts, true);
  CLI::App* check_cmd = app.add_subcommand("check", "run the numerical self-check battery");
  add_common(check_cmd, check_opts, false);

  try {
    app.parse(argc, argv);
    if (run_cmd->parsed()) return cmd_run(run_opts);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_opts);
    if (gen_cmd->parsed()) return cmd_gen(gen_opts);
    if (check_cmd->parsed()) return cmd_check(check_opts);
    return 2;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exits 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

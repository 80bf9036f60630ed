#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sparsethresh/generators.hpp"
#include "sparsethresh/linalg.hpp"

namespace sparsethresh {

/// Strict-schema guard shared by every JSON reader in the project: any key
/// outside the allowed set is a hard error rather than silently ignored.
inline void reject_unknown_keys(const nlohmann::json& j,
                                std::initializer_list<const char*> allowed, const char* where) {
  if (!j.is_object()) {
    throw std::invalid_argument(std::string(where) + ": expected a JSON object");
  }
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw std::invalid_argument(std::string(where) + ": unknown key \"" + item.key() + "\"");
    }
  }
}

inline const nlohmann::json& require_key(const nlohmann::json& j, const char* key,
                                         const char* where) {
  const auto it = j.find(key);
  if (it == j.end()) {
    throw std::invalid_argument(std::string(where) + ": missing key \"" + key + "\"");
  }
  return *it;
}

namespace detail {

inline Vector vector_from_json(const nlohmann::json& j, const char* where) {
  if (!j.is_array()) throw std::invalid_argument(std::string(where) + ": expected an array");
  Vector v;
  v.reserve(j.size());
  for (const auto& entry : j) {
    if (!entry.is_number()) {
      throw std::invalid_argument(std::string(where) + ": expected numeric entries");
    }
    v.push_back(entry.get<double>());
  }
  if (!all_finite(v)) throw std::invalid_argument(std::string(where) + ": non-finite entry");
  return v;
}

}  // namespace detail

/// File layout: scalar header (type, dims, sparsity, seed) plus flat arrays
/// for the design matrix (row-major), the measurement/label vector, and the
/// ground-truth signal. Doubles survive the round trip exactly.
inline nlohmann::json problem_to_json(const ProblemInstance& problem) {
  nlohmann::json j;
  j["type"] = to_string(problem.type);
  j["rows"] = problem.matrix.rows();
  j["cols"] = problem.matrix.cols();
  j["sparsity"] = problem.sparsity;
  j["seed"] = problem.seed;
  j["matrix"] = problem.matrix.data();
  j["target"] = problem.target;
  j["truth"] = problem.truth;
  return j;
}

inline ProblemInstance problem_from_json(const nlohmann::json& j) {
  static constexpr const char* kWhere = "problem";
  reject_unknown_keys(j, {"type", "rows", "cols", "sparsity", "seed", "matrix", "target", "truth"},
                      kWhere);
  ProblemInstance problem;
  problem.type = problem_type_from_string(require_key(j, "type", kWhere).get<std::string>());
  const auto rows = require_key(j, "rows", kWhere).get<std::size_t>();
  const auto cols = require_key(j, "cols", kWhere).get<std::size_t>();
  problem.sparsity = require_key(j, "sparsity", kWhere).get<std::size_t>();
  problem.seed = require_key(j, "seed", kWhere).get<std::uint64_t>();
  const Vector flat = detail::vector_from_json(require_key(j, "matrix", kWhere), "problem.matrix");
  if (flat.size() != rows * cols) {
    throw std::invalid_argument("problem.matrix: length does not match rows*cols");
  }
  problem.matrix = Matrix(rows, cols);
  problem.matrix.data() = flat;
  problem.target = detail::vector_from_json(require_key(j, "target", kWhere), "problem.target");
  if (problem.target.size() != rows) {
    throw std::invalid_argument("problem.target: length does not match rows");
  }
  problem.truth = detail::vector_from_json(require_key(j, "truth", kWhere), "problem.truth");
  if (problem.truth.size() != cols) {
    throw std::invalid_argument("problem.truth: length does not match cols");
  }
  if (problem.sparsity == 0 || problem.sparsity > cols) {
    throw std::invalid_argument("problem.sparsity: need 1 <= sparsity <= cols");
  }
  return problem;
}

inline void save_problem(const ProblemInstance& problem, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << problem_to_json(problem).dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline ProblemInstance load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("malformed JSON in " + path.string() + ": " + e.what());
  }
  return problem_from_json(j);
}

}  // namespace sparsethresh

#include "sparsethresh/problem_io.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace sparsethresh {
namespace {

namespace fs = std::filesystem;

class ProblemIoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / "sparsethresh_io_test";
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

TEST_F(ProblemIoTest, RoundTripIsBitExact) {
  const auto problem = make_problem(ProblemType::linear, 8, 12, 3, 0.0, 77);
  const fs::path path = dir_ / "problem.json";
  save_problem(problem, path);
  const auto loaded = load_problem(path);
  EXPECT_EQ(loaded.type, problem.type);
  EXPECT_EQ(loaded.sparsity, problem.sparsity);
  EXPECT_EQ(loaded.seed, problem.seed);
  EXPECT_EQ(loaded.matrix.rows(), problem.matrix.rows());
  EXPECT_EQ(loaded.matrix.cols(), problem.matrix.cols());
  EXPECT_EQ(loaded.matrix.data(), problem.matrix.data());
  EXPECT_EQ(loaded.target, problem.target);
  EXPECT_EQ(loaded.truth, problem.truth);
}

TEST_F(ProblemIoTest, ClassificationRoundTrip) {
  const auto problem = make_problem(ProblemType::svm, 6, 9, 2, 0.0, 78);
  const fs::path path = dir_ / "svm.json";
  save_problem(problem, path);
  const auto loaded = load_problem(path);
  EXPECT_EQ(loaded.type, ProblemType::svm);
  EXPECT_EQ(loaded.target, problem.target);
}

TEST_F(ProblemIoTest, UnknownKeyRejected) {
  auto j = problem_to_json(make_problem(ProblemType::linear, 4, 6, 2, 0.0, 1));
  j["extra"] = 1;
  EXPECT_THROW(problem_from_json(j), std::invalid_argument);
}

TEST_F(ProblemIoTest, MissingKeyRejected) {
  auto j = problem_to_json(make_problem(ProblemType::linear, 4, 6, 2, 0.0, 1));
  j.erase("truth");
  EXPECT_THROW(problem_from_json(j), std::invalid_argument);
}

TEST_F(ProblemIoTest, LengthMismatchesRejected) {
  const auto problem = make_problem(ProblemType::linear, 4, 6, 2, 0.0, 1);
  auto j = problem_to_json(problem);
  j["matrix"].erase(0);
  EXPECT_THROW(problem_from_json(j), std::invalid_argument);

  j = problem_to_json(problem);
  j["target"].push_back(0.0);
  EXPECT_THROW(problem_from_json(j), std::invalid_argument);

  j = problem_to_json(problem);
  j["truth"].erase(0);
  EXPECT_THROW(problem_from_json(j), std::invalid_argument);

  j = problem_to_json(problem);
  j["sparsity"] = 7;  // exceeds cols
  EXPECT_THROW(problem_from_json(j), std::invalid_argument);
}

TEST_F(ProblemIoTest, NonFiniteEntriesRejected) {
  auto j = problem_to_json(make_problem(ProblemType::linear, 4, 6, 2, 0.0, 1));
  j["truth"][0] = "nan";  // strings are not numbers
  EXPECT_THROW(problem_from_json(j), std::invalid_argument);
}

TEST_F(ProblemIoTest, MalformedFileRejected) {
  const fs::path path = dir_ / "broken.json";
  std::ofstream(path) << "{ not json";
  EXPECT_THROW(load_problem(path), std::invalid_argument);
  EXPECT_THROW(load_problem(dir_ / "missing.json"), std::runtime_error);
}

}  // namespace
}  // namespace sparsethresh

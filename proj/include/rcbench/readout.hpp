#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rcbench/datasets.hpp"

namespace rcbench {

/// One row per example.
using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct TrainConfig {
  std::size_t max_iter = 1000;
  double grad_tol = 1e-6;
  double l2_lambda = 1e-4;
  std::uint64_t seed = 0;  // unused: weights start at zero
  bool standardize = false;
  bool record_history = false;
  std::size_t history_size = 10;  // L-BFGS memory
};

struct ClassifierStats {
  std::size_t iterations = 0;
  double grad_norm = 0.0;
  std::vector<double> loss_history;  // loss before the first step and after each accepted step
};

struct ReadoutModel {
  std::size_t dimension = 0;
  Eigen::MatrixXd weights;  // dimension x 10, column c scores class c
  Eigen::VectorXd bias;     // 10
  // Empty unless trained with standardize: x' = (x - shift) / scale.
  Eigen::VectorXd shift;
  Eigen::VectorXd scale;
  std::vector<ClassifierStats> stats;
};

/// Mean binary cross-entropy plus (lambda/2)|w|^2 for several one-vs-rest
/// problems at once. Column j of `params` is (w_j; bias_j), length d + 1;
/// column j of `targets` holds the 0/1 indicators. Returns the per-column
/// losses and fills `gradients` (same shape as params).
Eigen::VectorXd logistic_objectives(const FeatureMatrix& features, const Eigen::MatrixXd& targets, double l2_lambda,
                                    const Eigen::MatrixXd& params, Eigen::MatrixXd& gradients);

/// One-vs-rest training: one L-BFGS problem per class with Armijo
/// backtracking, all ten advanced in lockstep so each pass over the data
/// serves every class.
ReadoutModel train_ovr(const FeatureMatrix& features, std::span<const Digit> labels, const TrainConfig& cfg = {});

std::vector<double> decision_scores(const ReadoutModel& model, std::span<const double> x);

/// Argmax of the scores; ties go to the lowest class.
Digit predict(const ReadoutModel& model, std::span<const double> x);
std::vector<Digit> predict_all(const ReadoutModel& model, const FeatureMatrix& features);

/// JSON record {"format": "rcbench-readout", "version": 1, ...}.
void save_model(const ReadoutModel& model, const std::filesystem::path& path);
ReadoutModel load_model(const std::filesystem::path& path);

}  // namespace rcbench

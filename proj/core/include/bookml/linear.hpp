#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bookml/feature_vector.hpp"

namespace bookml {

enum class LinearKind { Logistic, Svc };

// Multinomial logistic regression stores one weight row per class; the linear
// SVC is binary and stores a single row. Weights are row-major.
struct LinearModel {
  LinearKind kind = LinearKind::Logistic;
  int num_classes = 2;
  std::size_t dimension = 0;
  std::vector<double> weights;
  std::vector<double> intercepts;
  // Training metadata.
  std::size_t iterations = 0;
  double final_objective = 0.0;
  std::vector<double> objective_trace;

  std::size_t rows() const noexcept { return intercepts.size(); }
  std::span<const double> row(std::size_t k) const {
    return std::span<const double>(weights).subspan(k * dimension, dimension);
  }

  static LinearModel zeros(LinearKind kind, int num_classes, std::size_t dimension);
};

struct TrainConfig {
  std::size_t max_iters = 100;
  double step_size = 1.0;
  double l2_reg = 0.0;
  double tol = 1e-6;
  std::uint64_t seed = 0;
};

struct Objective {
  double loss = 0.0;
  std::vector<double> grad_weights;     // same layout as LinearModel::weights
  std::vector<double> grad_intercepts;
};

// Mean softmax cross-entropy plus (l2_reg / 2) * ||weights||^2; intercepts are
// not penalized. The gradient is exact.
Objective logistic_objective(const LinearModel& model, std::span<const FeatureVector> X,
                             std::span<const int> y, double l2_reg);

// Full-batch gradient descent with Armijo backtracking. The step halves until
// the objective decreases enough, and doubles again after an accepted step.
// Stops when the gradient norm drops below cfg.tol or after cfg.max_iters.
LinearModel train_logistic(std::span<const FeatureVector> X, std::span<const int> y, int num_classes,
                           const TrainConfig& cfg);

struct LogisticPrediction {
  int label = 0;
  std::vector<double> probabilities;
};

// Ties between class probabilities go to the lower class index.
LogisticPrediction predict_logistic(const LinearModel& model, const FeatureVector& x);

// Mean hinge loss with labels mapped to -1/+1, plus (l2_reg / 2) * ||w||^2.
double svc_objective(const LinearModel& model, std::span<const FeatureVector> X, std::span<const int> y,
                     double l2_reg);

// Subgradient descent with step cfg.step_size / sqrt(t), starting from zero.
// Returns the lowest-objective iterate seen.
LinearModel train_linear_svc(std::span<const FeatureVector> X, std::span<const int> y,
                             const TrainConfig& cfg);

struct SvcPrediction {
  int label = 0;
  double margin = 0.0;
};

// Label 1 iff margin > 0.
SvcPrediction predict_svc(const LinearModel& model, const FeatureVector& x);

}  // namespace bookml

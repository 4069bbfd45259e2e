#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bookml/feature_vector.hpp"
#include "bookml/features.hpp"

namespace bookml {

// A node of a binary split tree, stored in a flat array. A row goes to the
// left child iff x[feature] <= threshold.
struct TreeNode {
  bool leaf = true;
  std::uint32_t feature = 0;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double impurity_gain = 0.0;
  std::uint64_t n_samples = 0;
  // Classification: class distribution (sums to 1). Regression: empty.
  std::vector<double> distribution;
  // Regression leaf score.
  double value = 0.0;

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

// nodes[0] is the root. num_classes == 0 marks a regression tree.
struct DecisionTree {
  std::vector<TreeNode> nodes;
  int num_classes = 0;
  std::size_t dimension = 0;

  const TreeNode& leaf_for(const FeatureVector& x) const;
  std::size_t depth() const;

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;
};

double gini(std::span<const double> class_counts);

struct Split {
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = 0.0;
};

// Candidate thresholds per feature: midpoints between consecutive distinct
// values when there are at most max_bins of them, otherwise the boundaries of
// max_bins equal-frequency bins. Returns the split with the largest Gini
// decrease; ties go to the lower feature index, then the lower threshold.
std::optional<Split> best_split(std::span<const FeatureVector> X, std::span<const int> y, int num_classes,
                                std::span<const std::size_t> feature_subset, std::size_t max_bins);

// The threshold candidates described above for one feature's values.
std::vector<double> candidate_thresholds(std::vector<double> values, std::size_t max_bins);

struct TreeConfig {
  std::size_t max_depth = 5;
  std::size_t min_instances_per_node = 1;
  std::size_t max_bins = 32;
};

// Greedy growth to max_depth. A node stays a leaf when it is pure, too small
// to split, or has no valid split at all. An impure node whose best split has
// zero gain takes the first zero-gain candidate instead of stopping.
DecisionTree train_decision_tree(std::span<const FeatureVector> X, std::span<const int> y, int num_classes,
                                 const TreeConfig& cfg);

struct TreePrediction {
  int label = 0;
  std::vector<double> distribution;
};

// Ties in the leaf distribution go to the lower class.
TreePrediction predict_tree(const DecisionTree& tree, const FeatureVector& x);

// --- ensembles ---------------------------------------------------------------

struct ForestConfig {
  std::size_t num_trees = 20;
  std::size_t max_depth = 5;
  // 0 selects ceil(sqrt(dimension)).
  std::size_t feature_subset_size = 0;
  bool bootstrap = true;
  std::uint64_t seed = 0;
  std::size_t min_instances_per_node = 1;
  std::size_t max_bins = 32;
};

struct ForestModel {
  std::vector<DecisionTree> trees;
  int num_classes = 2;
  std::uint64_t seed = 0;

  friend bool operator==(const ForestModel&, const ForestModel&) = default;
};

// Tree t draws its bootstrap sample and per-node feature subsets from a
// generator seeded with derive_seed(seed, t), so training order does not matter.
ForestModel train_random_forest(std::span<const FeatureVector> X, std::span<const int> y, int num_classes,
                                const ForestConfig& cfg);

// Majority vote over tree labels; ties go to the lower class.
int predict_forest(const ForestModel& forest, const FeatureVector& x);

struct GBTConfig {
  std::size_t num_iters = 20;
  double learning_rate = 0.1;
  std::size_t max_depth = 5;
  std::size_t min_instances_per_node = 1;
  std::size_t max_bins = 32;
};

struct GBTModel {
  double initial_score = 0.0;
  std::vector<DecisionTree> trees;
  double learning_rate = 0.1;
  std::size_t dimension = 0;
  // Mean training log-loss: entry 0 for the prior, then one per stage.
  std::vector<double> train_log_loss;

  friend bool operator==(const GBTModel&, const GBTModel&) = default;
};

// Binary boosting on logistic loss. Each stage fits a variance-criterion
// regression tree to y - sigmoid(score) and sets each leaf with one Newton
// step, sum(residual) / sum(p * (1 - p)).
GBTModel train_gbt(std::span<const FeatureVector> X, std::span<const int> y, const GBTConfig& cfg);

struct GBTPrediction {
  int label = 0;
  double probability = 0.5;
  double score = 0.0;
};

// Label 1 iff score > 0.
GBTPrediction predict_gbt(const GBTModel& model, const FeatureVector& x);

// --- importances -------------------------------------------------------------

struct Importances {
  std::vector<double> per_feature;  // normalized to sum 1 (all zero when degenerate)
  std::vector<double> per_block;    // per_feature summed within each block
  bool degenerate = false;          // the model has no split at all
};

// Per feature: sum over split nodes of (n_samples / root n_samples) * gain,
// accumulated over every tree, then normalized.
Importances feature_importances(const DecisionTree& tree, const BlockMap& blocks);
Importances feature_importances(const ForestModel& forest, const BlockMap& blocks);
Importances feature_importances(const GBTModel& model, const BlockMap& blocks);

}  // namespace bookml

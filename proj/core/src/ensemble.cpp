#include <algorithm>
#include <cmath>
#include <string>

#include "bookml/error.hpp"
#include "bookml/parallel.hpp"
#include "bookml/rng.hpp"
#include "tree_builder.hpp"

namespace bookml {

ForestModel train_random_forest(std::span<const FeatureVector> X, std::span<const int> y, int num_classes,
                                const ForestConfig& cfg) {
  if (X.empty()) throw_data("random forest: empty training data");
  if (X.size() != y.size()) throw_data("features/labels length mismatch");
  if (cfg.num_trees == 0) throw_config("random forest needs at least one tree");
  for (int v : y) {
    if (v < 0 || v >= num_classes) throw_data("label " + std::to_string(v) + " out of range");
  }
  const std::size_t d = X.front().dimension();
  if (cfg.feature_subset_size > d) {
    throw_config("feature_subset_size " + std::to_string(cfg.feature_subset_size) + " exceeds dimension " +
                 std::to_string(d));
  }
  const std::size_t subset =
      cfg.feature_subset_size > 0
          ? cfg.feature_subset_size
          : std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d)))));

  const detail::BinnedMatrix data(X, cfg.max_bins);
  const detail::Target target{num_classes, y, {}, {}};

  ForestModel forest;
  forest.num_classes = num_classes;
  forest.seed = cfg.seed;
  forest.trees.resize(cfg.num_trees);
  parallel_for(cfg.num_trees, [&](std::size_t t) {
    Rng rng(derive_seed(cfg.seed, t));
    std::vector<std::uint32_t> weights(X.size(), 1);
    if (cfg.bootstrap) {
      std::fill(weights.begin(), weights.end(), 0u);
      for (std::size_t i = 0; i < X.size(); ++i) ++weights[uniform_index(rng, X.size())];
    }
    detail::GrowParams params;
    params.max_depth = cfg.max_depth;
    params.min_instances_per_node = std::max<std::size_t>(1, cfg.min_instances_per_node);
    params.feature_subset_size = subset;
    params.rng = &rng;
    forest.trees[t] = detail::grow_tree(data, target, weights, params);
  });
  return forest;
}

int predict_forest(const ForestModel& forest, const FeatureVector& x) {
  std::vector<std::size_t> votes(static_cast<std::size_t>(forest.num_classes), 0);
  for (const auto& tree : forest.trees) ++votes[static_cast<std::size_t>(predict_tree(tree, x).label)];
  return static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
}

namespace {

double sigmoid(double s) {
  if (s >= 0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

// log(1 + e^s) - y s, the logistic loss written in terms of the score.
double log_loss(double score, int y) {
  const double softplus = score > 0 ? score + std::log1p(std::exp(-score)) : std::log1p(std::exp(score));
  return softplus - (y == 1 ? score : 0.0);
}

double tree_score(const DecisionTree& t, const FeatureVector& x) { return t.leaf_for(x).value; }

}  // namespace

GBTModel train_gbt(std::span<const FeatureVector> X, std::span<const int> y, const GBTConfig& cfg) {
  if (X.empty()) throw_data("gbt: empty training data");
  if (X.size() != y.size()) throw_data("features/labels length mismatch");
  if (!(cfg.learning_rate > 0.0)) throw_config("gbt: learning_rate must be positive");
  std::size_t positives = 0;
  for (int v : y) {
    if (v != 0 && v != 1) throw_data("gbt: labels must be binary");
    positives += static_cast<std::size_t>(v);
  }
  if (positives == 0 || positives == y.size()) throw_data("gbt: both classes must be present");

  const std::size_t n = X.size();
  const double p = static_cast<double>(positives) / static_cast<double>(n);
  GBTModel model;
  model.initial_score = std::log(p / (1.0 - p));
  model.learning_rate = cfg.learning_rate;
  model.dimension = X.front().dimension();

  std::vector<double> score(n, model.initial_score);
  const auto mean_loss = [&] {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += log_loss(score[i], y[i]);
    return acc / static_cast<double>(n);
  };
  model.train_log_loss.push_back(mean_loss());
  if (cfg.num_iters == 0) return model;

  const detail::BinnedMatrix data(X, cfg.max_bins);
  const std::vector<std::uint32_t> weights(n, 1);
  std::vector<double> g(n), h(n);
  detail::GrowParams params;
  params.max_depth = cfg.max_depth;
  params.min_instances_per_node = std::max<std::size_t>(1, cfg.min_instances_per_node);

  for (std::size_t stage = 0; stage < cfg.num_iters; ++stage) {
    for (std::size_t i = 0; i < n; ++i) {
      const double pi = sigmoid(score[i]);
      g[i] = static_cast<double>(y[i]) - pi;
      h[i] = pi * (1.0 - pi);
    }
    auto tree = detail::grow_tree(data, detail::Target{0, {}, g, h}, weights, params);
    for (std::size_t i = 0; i < n; ++i) {
      score[i] += cfg.learning_rate * tree_score(tree, X[i]);
      if (!std::isfinite(score[i])) throw_numeric("gbt: non-finite score at stage " + std::to_string(stage));
    }
    model.trees.push_back(std::move(tree));
    model.train_log_loss.push_back(mean_loss());
  }
  return model;
}

GBTPrediction predict_gbt(const GBTModel& model, const FeatureVector& x) {
  double s = 0.0;
  for (const auto& t : model.trees) s += tree_score(t, x);
  GBTPrediction p;
  p.score = model.initial_score + model.learning_rate * s;
  p.probability = sigmoid(p.score);
  p.label = p.score > 0.0 ? 1 : 0;
  return p;
}

}  // namespace bookml

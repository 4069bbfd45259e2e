#include "bookml/app/models.hpp"

#include <algorithm>

#include "bookml/error.hpp"
#include "bookml/rng.hpp"

namespace bookml::app {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::size_t as_size(const Params& p, std::string_view name, std::int64_t fallback) {
  const auto v = param_int(p, name, fallback);
  if (v < 0) throw_config("parameter " + std::string(name) + " must be nonnegative");
  return static_cast<std::size_t>(v);
}

TrainConfig linear_config(const Params& p, std::uint64_t seed) {
  TrainConfig c;
  c.max_iters = as_size(p, "max_iters", 100);
  c.step_size = param_double(p, "step_size", 1.0);
  c.l2_reg = param_double(p, "l2_reg", 0.0);
  c.tol = param_double(p, "tol", 1e-6);
  c.seed = seed;
  return c;
}

void require_binary(const LabeledData& d, std::string_view what) {
  if (d.num_classes != 2) throw_config(std::string(what) + " requires binary labels");
}

}  // namespace

int ModelClassifier::predict(const FeatureVector& x) const {
  return std::visit(overloaded{
                        [&](const LinearModel& m) {
                          return m.kind == LinearKind::Svc ? predict_svc(m, x).label : predict_logistic(m, x).label;
                        },
                        [&](const DecisionTree& m) { return predict_tree(m, x).label; },
                        [&](const ForestModel& m) { return predict_forest(m, x); },
                        [&](const GBTModel& m) { return predict_gbt(m, x).label; },
                    },
                    model_);
}

double ModelClassifier::score(const FeatureVector& x) const {
  return std::visit(overloaded{
                        [&](const LinearModel& m) {
                          if (m.kind == LinearKind::Svc) return predict_svc(m, x).margin;
                          const auto p = predict_logistic(m, x);
                          return p.probabilities[static_cast<std::size_t>(p.label)];
                        },
                        [&](const DecisionTree& m) {
                          const auto p = predict_tree(m, x);
                          return p.distribution[static_cast<std::size_t>(p.label)];
                        },
                        [&](const ForestModel& m) { return static_cast<double>(predict_forest(m, x)); },
                        [&](const GBTModel& m) { return predict_gbt(m, x).score; },
                    },
                    model_);
}

std::string display_name(ModelName m) {
  switch (m) {
    case ModelName::Logistic: return "Logistic Regression";
    case ModelName::Svc: return "Linear SVC";
    case ModelName::DecisionTree: return "Decision Tree";
    case ModelName::RandomForest: return "Random Forest";
    case ModelName::Gbt: return "GBT Classifier";
    case ModelName::Als: return "ALS";
    case ModelName::AlsImplicit: return "ALS Implicit";
  }
  return "?";
}

ParamGrid default_grid(ModelName m) {
  ParamGrid g;
  switch (m) {
    case ModelName::Logistic:
    case ModelName::Svc:
      g.axes["l2_reg"] = {0.0, 0.01, 0.1};
      g.axes["max_iters"] = {std::int64_t{100}, std::int64_t{300}};
      break;
    case ModelName::DecisionTree:
      g.axes["max_depth"] = {std::int64_t{5}, std::int64_t{8}};
      g.axes["max_bins"] = {std::int64_t{32}};
      break;
    case ModelName::RandomForest:
      g.axes["num_trees"] = {std::int64_t{20}};
      g.axes["max_depth"] = {std::int64_t{5}, std::int64_t{8}};
      g.axes["max_bins"] = {std::int64_t{32}};
      break;
    case ModelName::Gbt:
      g.axes["num_iters"] = {std::int64_t{20}};
      g.axes["learning_rate"] = {0.1};
      g.axes["max_depth"] = {std::int64_t{3}, std::int64_t{5}};
      g.axes["max_bins"] = {std::int64_t{32}};
      break;
    case ModelName::Als:
    case ModelName::AlsImplicit: throw_config("factor models are not grid-tuned");
  }
  return g;
}

ParamGrid effective_grid(ModelName m, const ParamGrid& overrides) {
  static const std::map<ModelName, std::vector<std::string>> extra = {
      {ModelName::Logistic, {"step_size", "tol"}},
      {ModelName::Svc, {"step_size", "tol"}},
      {ModelName::DecisionTree, {"min_instances_per_node"}},
      {ModelName::RandomForest, {"min_instances_per_node", "feature_subset_size", "bootstrap"}},
      {ModelName::Gbt, {"min_instances_per_node"}},
  };
  ParamGrid g = default_grid(m);
  for (const auto& [axis, values] : overrides.axes) {
    const auto& allowed = extra.at(m);
    if (!g.axes.count(axis) && std::find(allowed.begin(), allowed.end(), axis) == allowed.end()) {
      throw_config("grid axis '" + axis + "' does not apply to " + std::string(to_string(m)));
    }
    g.axes[axis] = values;
  }
  return g;
}

Trainer make_trainer(ModelName m, std::uint64_t seed) {
  switch (m) {
    case ModelName::Logistic:
      return [seed](const LabeledData& d, const Params& p) -> std::shared_ptr<const Classifier> {
        return std::make_shared<ModelClassifier>(train_logistic(d.X, d.y, d.num_classes, linear_config(p, seed)));
      };
    case ModelName::Svc:
      return [seed](const LabeledData& d, const Params& p) -> std::shared_ptr<const Classifier> {
        require_binary(d, "svc");
        return std::make_shared<ModelClassifier>(train_linear_svc(d.X, d.y, linear_config(p, seed)));
      };
    case ModelName::DecisionTree:
      return [](const LabeledData& d, const Params& p) -> std::shared_ptr<const Classifier> {
        TreeConfig c;
        c.max_depth = as_size(p, "max_depth", 5);
        c.max_bins = as_size(p, "max_bins", 32);
        c.min_instances_per_node = as_size(p, "min_instances_per_node", 1);
        return std::make_shared<ModelClassifier>(train_decision_tree(d.X, d.y, d.num_classes, c));
      };
    case ModelName::RandomForest:
      return [seed](const LabeledData& d, const Params& p) -> std::shared_ptr<const Classifier> {
        ForestConfig c;
        c.num_trees = as_size(p, "num_trees", 20);
        c.max_depth = as_size(p, "max_depth", 5);
        c.max_bins = as_size(p, "max_bins", 32);
        c.min_instances_per_node = as_size(p, "min_instances_per_node", 1);
        c.feature_subset_size = as_size(p, "feature_subset_size", 0);
        c.bootstrap = param_int(p, "bootstrap", 1) != 0;
        c.seed = derive_seed(seed, 0xf0);
        return std::make_shared<ModelClassifier>(train_random_forest(d.X, d.y, d.num_classes, c));
      };
    case ModelName::Gbt:
      return [](const LabeledData& d, const Params& p) -> std::shared_ptr<const Classifier> {
        require_binary(d, "gbt");
        GBTConfig c;
        c.num_iters = as_size(p, "num_iters", 20);
        c.learning_rate = param_double(p, "learning_rate", 0.1);
        c.max_depth = as_size(p, "max_depth", 3);
        c.max_bins = as_size(p, "max_bins", 32);
        c.min_instances_per_node = as_size(p, "min_instances_per_node", 1);
        return std::make_shared<ModelClassifier>(train_gbt(d.X, d.y, c));
      };
    case ModelName::Als:
    case ModelName::AlsImplicit: break;
  }
  throw_config("no classifier trainer for " + std::string(to_string(m)));
}

std::optional<Importances> importances_for(const ClassifierModel& m, const BlockMap& blocks) {
  return std::visit(overloaded{
                        [](const LinearModel&) -> std::optional<Importances> { return std::nullopt; },
                        [&](const auto& tree_model) -> std::optional<Importances> {
                          return feature_importances(tree_model, blocks);
                        },
                    },
                    m);
}

}  // namespace bookml::app

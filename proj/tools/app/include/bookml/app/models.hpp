#pragma once

#include <memory>
#include <optional>
#include <string>

#include "bookml/app/config.hpp"
#include "bookml/serialize.hpp"
#include "bookml/selection.hpp"

namespace bookml::app {

// Adapts any persisted classifier to the tuning interface.
class ModelClassifier final : public Classifier {
 public:
  explicit ModelClassifier(ClassifierModel model) : model_(std::move(model)) {}

  int predict(const FeatureVector& x) const override;
  // A model-specific real output used for bitwise round-trip checks:
  // class probability, SVC margin, GBT score or the forest vote.
  double score(const FeatureVector& x) const;

  const ClassifierModel& model() const noexcept { return model_; }

 private:
  ClassifierModel model_;
};

// Table row name, e.g. "Logistic Regression".
std::string display_name(ModelName m);

// Axes each classifier accepts, with the default values.
ParamGrid default_grid(ModelName m);

// Default grid with each override replacing its axis. Unknown axes are config
// errors.
ParamGrid effective_grid(ModelName m, const ParamGrid& overrides);

Trainer make_trainer(ModelName m, std::uint64_t seed);

std::optional<Importances> importances_for(const ClassifierModel& m, const BlockMap& blocks);

}  // namespace bookml::app

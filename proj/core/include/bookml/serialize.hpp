#pragma once

#include <map>
#include <string>
#include <string_view>
#include <variant>

#include "bookml/linear.hpp"
#include "bookml/pipeline.hpp"
#include "bookml/recommender.hpp"
#include "bookml/tree.hpp"

namespace bookml {

// All documents are JSON text. Doubles are written with 17 significant digits
// so a round trip reproduces every bit; non-finite values are written as the
// strings "nan", "inf" and "-inf". Readers reject unknown formats, newer
// versions and structurally invalid documents with a data error.

using ClassifierModel = std::variant<LinearModel, DecisionTree, ForestModel, GBTModel>;

std::string_view model_kind(const ClassifierModel& m);

std::string pipeline_to_json(const PipelineModel& p);
PipelineModel pipeline_from_json(std::string_view text);

std::string model_to_json(const ClassifierModel& m);
ClassifierModel model_from_json(std::string_view text);

std::string factor_model_to_json(const FactorModel& m);
FactorModel factor_model_from_json(std::string_view text);

// Pipeline and classifier in one document, plus free-form string metadata.
struct ModelBundle {
  PipelineModel pipeline;
  ClassifierModel model;
  std::map<std::string, std::string> metadata;
};

std::string bundle_to_json(const ModelBundle& b);
ModelBundle bundle_from_json(std::string_view text);

}  // namespace bookml

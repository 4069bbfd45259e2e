#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "bookml/pipeline.hpp"
#include "bookml/selection.hpp"

namespace bookml::app {

enum class ModelName { Logistic, Svc, DecisionTree, RandomForest, Gbt, Als, AlsImplicit };

std::string_view to_string(ModelName m);
ModelName model_from_string(std::string_view s);
bool is_factor_model(ModelName m);

struct RunConfig {
  std::filesystem::path ratings_path;
  std::filesystem::path books_path;
  std::filesystem::path out = "bookml-out";
  // Prepared table directory; defaults to <out>/prepare/table.
  std::optional<std::filesystem::path> prepared;
  std::optional<std::size_t> sample_rows;
  double max_malformed_fraction = 0.01;

  LabelMode label_mode = LabelMode::Multiclass;
  ModelName model = ModelName::Logistic;
  std::string tuning = "tvs";  // "cv" or "tvs"
  std::size_t folds = 3;
  double train_ratio = 0.8;
  double test_fraction = 0.2;
  Metric metric = Metric::WeightedF1;
  // Replaces the default grid axis of the same name.
  ParamGrid grid_overrides;
  std::uint64_t seed = 42;
  std::size_t threads = 0;  // 0 keeps the library default

  std::size_t vocab_size = 1000;
  std::size_t min_df = 2;
  bool use_review_text = false;

  std::size_t als_rank = 10;
  double als_reg = 0.1;
  std::size_t als_sweeps = 10;
  double als_alpha = 40.0;

  std::string user;
  std::size_t top_n = 10;
  bool exclude_seen = true;

  std::filesystem::path prepared_dir() const;
  std::filesystem::path command_dir(std::string_view command) const;
};

// Reads a JSON object whose keys are the RunConfig field names. Unknown keys
// and wrongly typed values are config errors.
RunConfig load_config(const std::filesystem::path& path);
RunConfig config_from_json(std::string_view text, RunConfig base = {});

// Checks cross-field invariants such as svc/gbt requiring binary labels.
void validate(const RunConfig& cfg);

// Every effective value, defaults included, as a JSON object.
std::string config_to_json(const RunConfig& cfg);

}  // namespace bookml::app

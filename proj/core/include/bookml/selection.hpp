#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bookml/feature_vector.hpp"
#include "bookml/metrics.hpp"
#include "bookml/table.hpp"

namespace bookml {

using ParamValue = std::variant<std::int64_t, double, std::string>;
using Params = std::map<std::string, ParamValue>;

struct ParamGrid {
  std::map<std::string, std::vector<ParamValue>> axes;

  std::size_t size() const;
};

// Cartesian product; axes vary in name order with the last axis fastest.
std::vector<Params> expand_grid(const ParamGrid& grid);

std::string to_string(const ParamValue& v);
std::string to_string(const Params& p);
// Numeric lookups accept either int64 or double values.
double param_double(const Params& p, std::string_view name, double fallback);
std::int64_t param_int(const Params& p, std::string_view name, std::int64_t fallback);

struct LabeledData {
  std::vector<FeatureVector> X;
  std::vector<int> y;
  int num_classes = 2;

  std::size_t size() const noexcept { return y.size(); }
  LabeledData subset(std::span<const std::size_t> rows) const;
};

LabeledData labeled_from_table(const Table& t, std::string_view features_col, std::string_view label_col,
                               int num_classes);

class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual int predict(const FeatureVector& x) const = 0;
};

using Trainer = std::function<std::shared_ptr<const Classifier>(const LabeledData&, const Params&)>;

enum class Metric { Accuracy, WeightedF1, WeightedPrecision, WeightedRecall };

std::string_view to_string(Metric m);
Metric metric_from_string(std::string_view s);
double metric_value(const MetricsReport& r, Metric m);
MetricsReport evaluate_classifier(const Classifier& model, const LabeledData& data);

struct CandidateResult {
  Params params;
  std::vector<double> scores;  // one per fold, or the single holdout score
  double mean = 0.0;
  double wall_seconds = 0.0;
  std::optional<std::string> error;
};

struct TuneResult {
  std::string method;  // "cv" or "tvs"
  std::size_t folds = 0;
  double train_ratio = 0.0;
  std::uint64_t seed = 0;
  Metric metric = Metric::WeightedF1;
  std::vector<CandidateResult> table;
  std::size_t best_index = 0;
  Params best_params;
  double best_metric = 0.0;
  // Best parameters refit on all rows.
  std::shared_ptr<const Classifier> best_model;
};

// Shuffles 0..n-1 with the seed and deals position i to fold i % k.
std::vector<std::vector<std::size_t>> make_folds(std::size_t n, std::size_t k, std::uint64_t seed);

// Candidates are scored in parallel into a table indexed by grid position,
// so the result does not depend on the worker count. The highest mean wins;
// ties keep the earlier grid point. A failing candidate is disqualified, and
// only a grid where every candidate fails raises an error.
TuneResult cross_validate(const Trainer& trainer, const ParamGrid& grid, const LabeledData& data, std::size_t k,
                          Metric metric, std::uint64_t seed);

// Train on the first floor(ratio * n) rows of a seeded permutation, validate
// on the rest.
TuneResult train_validation_split(const Trainer& trainer, const ParamGrid& grid, const LabeledData& data,
                                  double train_ratio, Metric metric, std::uint64_t seed);

}  // namespace bookml

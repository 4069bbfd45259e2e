#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bookml/app/config.hpp"
#include "bookml/app/data.hpp"
#include "bookml/metrics.hpp"
#include "bookml/recommender.hpp"
#include "bookml/selection.hpp"
#include "bookml/tree.hpp"

namespace bookml::app {

// Each command writes into <out>/<command>/ and finishes with a _SUCCESS
// marker. Failures surface as bookml::Error; see exit_code().

struct PrepareOutcome {
  PrepareSummary summary;
  std::filesystem::path table_dir;
};
PrepareOutcome cmd_prepare(const RunConfig& cfg, std::ostream& log);

struct TrainOutcome {
  std::filesystem::path dir;
  std::string model_label;  // e.g. "Logistic Regression (tvs)"
  std::optional<TuneResult> tune;
  std::optional<MetricsReport> test_metrics;
  BlockMap blocks;
  std::optional<Importances> importances;
  std::optional<HoldoutEvaluation> holdout;
  std::string report_text;
};
TrainOutcome cmd_train(const RunConfig& cfg, std::ostream& log);

struct CompareRun {
  std::string mode;
  bool trained = false;
  std::size_t classes_present = 0;
  double dominant_share = 0.0;
  std::optional<MetricsReport> metrics;
  std::optional<Params> best_params;
  double seconds = 0.0;
};
struct CompareOutcome {
  CompareRun multiclass;
  CompareRun binary;
  std::optional<double> accuracy_delta;  // binary minus multiclass
  bool inconclusive = false;
  std::vector<std::string> flags;
  std::string report_text;
};
// Above this share of the most common training class, a run is flagged as
// dominated by one class and the comparison is marked inconclusive.
inline constexpr double kDominanceThreshold = 0.95;
CompareOutcome cmd_compare(const RunConfig& cfg, std::ostream& log);

struct RecommendOutcome {
  Recommendation recommendation;
  std::string report_text;
};
RecommendOutcome cmd_recommend(const RunConfig& cfg, std::ostream& log);

struct VerifyOutcome {
  std::vector<std::string> artifacts;
  std::size_t probes = 0;
  std::size_t mismatches = 0;
};
// Throws a data error when any probe differs after the round trip.
VerifyOutcome cmd_verify_model(const RunConfig& cfg, std::ostream& log);

// Maps an exception to the documented process exit codes:
// 2 config, 3 data, 4 numeric.
int exit_code(const std::exception& e);

// Feature stages for the prepared table: min-max on price and review time,
// tokenize -> stop words -> counts -> tf-idf on the summary (and the review
// text when enabled), assembled into "features". With a label mode, a final
// stage writes "label".
std::vector<StageSpec> feature_stages(const RunConfig& cfg, std::optional<LabelMode> labels);

}  // namespace bookml::app

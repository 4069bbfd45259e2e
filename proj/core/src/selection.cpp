#include "bookml/selection.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "bookml/error.hpp"
#include "bookml/parallel.hpp"
#include "bookml/rng.hpp"

namespace bookml {

std::size_t ParamGrid::size() const {
  std::size_t n = 1;
  for (const auto& [_, values] : axes) n *= values.size();
  return n;
}

std::vector<Params> expand_grid(const ParamGrid& grid) {
  for (const auto& [name, values] : grid.axes) {
    if (values.empty()) throw_config("parameter grid axis '" + name + "' is empty");
  }
  std::vector<Params> out(1);
  for (const auto& [name, values] : grid.axes) {
    std::vector<Params> next;
    next.reserve(out.size() * values.size());
    for (const auto& p : out) {
      for (const auto& v : values) {
        auto q = p;
        q[name] = v;
        next.push_back(std::move(q));
      }
    }
    out = std::move(next);
  }
  return out;
}

std::string to_string(const ParamValue& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::string>) {
          return x;
        } else if constexpr (std::is_same_v<T, double>) {
          std::ostringstream os;
          os << x;
          return os.str();
        } else {
          return std::to_string(x);
        }
      },
      v);
}

std::string to_string(const Params& p) {
  std::string out;
  for (const auto& [k, v] : p) {
    if (!out.empty()) out += ", ";
    out += k + "=" + to_string(v);
  }
  return out;
}

double param_double(const Params& p, std::string_view name, double fallback) {
  const auto it = p.find(std::string(name));
  if (it == p.end()) return fallback;
  if (const auto* d = std::get_if<double>(&it->second)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&it->second)) return static_cast<double>(*i);
  throw_config("parameter '" + std::string(name) + "' is not numeric");
}

std::int64_t param_int(const Params& p, std::string_view name, std::int64_t fallback) {
  const auto it = p.find(std::string(name));
  if (it == p.end()) return fallback;
  if (const auto* i = std::get_if<std::int64_t>(&it->second)) return *i;
  if (const auto* d = std::get_if<double>(&it->second)) {
    if (std::floor(*d) == *d) return static_cast<std::int64_t>(*d);
  }
  throw_config("parameter '" + std::string(name) + "' is not an integer");
}

LabeledData LabeledData::subset(std::span<const std::size_t> rows) const {
  LabeledData out;
  out.num_classes = num_classes;
  out.X.reserve(rows.size());
  out.y.reserve(rows.size());
  for (auto r : rows) {
    out.X.push_back(X.at(r));
    out.y.push_back(y.at(r));
  }
  return out;
}

LabeledData labeled_from_table(const Table& t, std::string_view features_col, std::string_view label_col,
                               int num_classes) {
  const auto& fc = t.column(features_col);
  const auto& lc = t.column(label_col);
  if (fc.dtype() != DType::Vector) throw_data("column '" + std::string(features_col) + "' is not a vector column");
  if (lc.dtype() != DType::Int64) throw_data("column '" + std::string(label_col) + "' is not an int64 column");
  LabeledData d;
  d.num_classes = num_classes;
  d.X = fc.values<FeatureVector>();
  d.y.reserve(t.row_count());
  for (std::size_t r = 0; r < t.row_count(); ++r) {
    const auto v = lc.values<std::int64_t>()[r];
    if (lc.is_null(r) || v < 0 || v >= num_classes) throw_data("label out of range at row " + std::to_string(r));
    d.y.push_back(static_cast<int>(v));
  }
  return d;
}

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::Accuracy: return "accuracy";
    case Metric::WeightedF1: return "f1";
    case Metric::WeightedPrecision: return "precision";
    case Metric::WeightedRecall: return "recall";
  }
  return "?";
}

Metric metric_from_string(std::string_view s) {
  if (s == "accuracy") return Metric::Accuracy;
  if (s == "f1") return Metric::WeightedF1;
  if (s == "precision") return Metric::WeightedPrecision;
  if (s == "recall") return Metric::WeightedRecall;
  throw_config("unknown metric '" + std::string(s) + "' (accuracy, f1, precision, recall)");
}

double metric_value(const MetricsReport& r, Metric m) {
  switch (m) {
    case Metric::Accuracy: return r.accuracy;
    case Metric::WeightedF1: return r.weighted_f1;
    case Metric::WeightedPrecision: return r.weighted_precision;
    case Metric::WeightedRecall: return r.weighted_recall;
  }
  return 0.0;
}

MetricsReport evaluate_classifier(const Classifier& model, const LabeledData& data) {
  std::vector<int> preds(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) preds[i] = model.predict(data.X[i]);
  return evaluate_multiclass(preds, data.y, data.num_classes);
}

std::vector<std::vector<std::size_t>> make_folds(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw_config("cross-validation needs k >= 2");
  if (k > n) throw_data("cross-validation: k=" + std::to_string(k) + " exceeds row count " + std::to_string(n));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<std::size_t>> folds(k);
  for (std::size_t i = 0; i < n; ++i) folds[i % k].push_back(order[i]);
  return folds;
}

namespace {

struct Holdout {
  std::vector<std::size_t> train;
  std::vector<std::size_t> valid;
};

struct TaskResult {
  double score = 0.0;
  double seconds = 0.0;
  std::optional<std::string> error;
  ErrorKind kind = ErrorKind::Data;
};

TuneResult tune(const Trainer& trainer, const ParamGrid& grid, const LabeledData& data,
                const std::vector<Holdout>& splits, Metric metric) {
  const auto candidates = expand_grid(grid);
  const std::size_t S = splits.size();
  std::vector<TaskResult> tasks(candidates.size() * S);

  parallel_for(tasks.size(), [&](std::size_t t) {
    const auto& params = candidates[t / S];
    const auto& split = splits[t % S];
    auto& out = tasks[t];
    const auto start = std::chrono::steady_clock::now();
    try {
      const auto model = trainer(data.subset(split.train), params);
      out.score = metric_value(evaluate_classifier(*model, data.subset(split.valid)), metric);
    } catch (const Error& e) {
      out.error = e.what();
      out.kind = e.kind();
    } catch (const std::exception& e) {
      out.error = e.what();
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  });

  TuneResult result;
  result.metric = metric;
  std::optional<std::size_t> best;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    CandidateResult row;
    row.params = candidates[c];
    for (std::size_t s = 0; s < S; ++s) {
      const auto& task = tasks[c * S + s];
      row.wall_seconds += task.seconds;
      if (task.error && !row.error) row.error = *task.error;
      row.scores.push_back(task.score);
    }
    if (!row.error) {
      row.mean = std::accumulate(row.scores.begin(), row.scores.end(), 0.0) / static_cast<double>(S);
      if (!best || row.mean > result.table[*best].mean) best = c;
    }
    result.table.push_back(std::move(row));
  }
  if (!best) {
    const auto first = std::find_if(tasks.begin(), tasks.end(), [](const TaskResult& t) { return t.error; });
    throw Error(first->kind, "every tuning candidate failed; first error: " + *first->error);
  }
  result.best_index = *best;
  result.best_params = result.table[*best].params;
  result.best_metric = result.table[*best].mean;
  result.best_model = trainer(data, result.best_params);
  return result;
}

}  // namespace

TuneResult cross_validate(const Trainer& trainer, const ParamGrid& grid, const LabeledData& data, std::size_t k,
                          Metric metric, std::uint64_t seed) {
  const auto folds = make_folds(data.size(), k, seed);
  std::vector<Holdout> splits(k);
  for (std::size_t f = 0; f < k; ++f) {
    splits[f].valid = folds[f];
    for (std::size_t g = 0; g < k; ++g) {
      if (g != f) splits[f].train.insert(splits[f].train.end(), folds[g].begin(), folds[g].end());
    }
    std::sort(splits[f].train.begin(), splits[f].train.end());
    std::sort(splits[f].valid.begin(), splits[f].valid.end());
  }
  auto result = tune(trainer, grid, data, splits, metric);
  result.method = "cv";
  result.folds = k;
  result.seed = seed;
  return result;
}

TuneResult train_validation_split(const Trainer& trainer, const ParamGrid& grid, const LabeledData& data,
                                  double train_ratio, Metric metric, std::uint64_t seed) {
  if (!(train_ratio > 0.0 && train_ratio < 1.0)) throw_config("train ratio must lie strictly between 0 and 1");
  const auto n = data.size();
  const auto n_train = static_cast<std::size_t>(std::floor(train_ratio * static_cast<double>(n)));
  if (n_train == 0 || n_train >= n) throw_data("train/validation split leaves an empty side");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  shuffle(order.begin(), order.end(), rng);
  Holdout h;
  h.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  h.valid.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  std::sort(h.train.begin(), h.train.end());
  std::sort(h.valid.begin(), h.valid.end());
  auto result = tune(trainer, grid, data, {h}, metric);
  result.method = "tvs";
  result.train_ratio = train_ratio;
  result.seed = seed;
  return result;
}

}  // namespace bookml

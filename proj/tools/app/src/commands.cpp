#include "bookml/app/commands.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstring>

#include "bookml/app/models.hpp"
#include "bookml/app/report.hpp"
#include "bookml/csv.hpp"
#include "bookml/error.hpp"
#include "bookml/parallel.hpp"
#include "bookml/rng.hpp"
#include "bookml/serialize.hpp"
#include "bookml/table_io.hpp"
#include "bookml/table_ops.hpp"
#include "json.hpp"

namespace bookml::app {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr std::size_t kMaxProbes = 1000;
constexpr std::string_view kR2Note =
    "R2 = 1 - SS_res / SS_tot over the held-out ratings; a negative value means the predictions fit worse "
    "than always predicting the mean held-out rating.";

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void apply_threads(const RunConfig& cfg) {
  if (cfg.threads > 0) set_num_threads(cfg.threads);
}

Table load_prepared(const RunConfig& cfg) {
  const auto dir = cfg.prepared_dir();
  if (!std::filesystem::exists(dir / "schema.json")) {
    throw_data("no prepared table at " + dir.string() + "; run `bookml prepare` first");
  }
  return load_table(dir);
}

std::uint64_t feature_hash(const FeatureVector& v) {
  std::uint64_t h = 1469598103934665603ULL;
  const auto mix = [&](std::uint64_t x) {
    for (int b = 0; b < 8; ++b) {
      h ^= (x >> (8 * b)) & 0xff;
      h *= 1099511628211ULL;
    }
  };
  mix(v.dimension());
  v.for_each_nonzero([&](std::size_t i, double x) {
    mix(i);
    mix(std::bit_cast<std::uint64_t>(x));
  });
  return h;
}

json metrics_json(const MetricsReport& r) {
  return json{{"accuracy", r.accuracy},   {"precision", r.weighted_precision}, {"recall", r.weighted_recall},
              {"f1", r.weighted_f1},      {"confusion", r.confusion},          {"per_class_precision", r.precision},
              {"per_class_recall", r.recall}, {"per_class_f1", r.f1},          {"support", r.support}};
}

json params_json(const Params& p) {
  json j = json::object();
  for (const auto& [k, v] : p) j[k] = std::visit([](const auto& x) { return json(x); }, v);
  return j;
}

json tune_json(const TuneResult& t) {
  json rows = json::array();
  for (const auto& c : t.table) {
    json r{{"params", params_json(c.params)}, {"scores", c.scores}, {"mean", c.mean},
           {"wall_seconds", c.wall_seconds}};
    r["error"] = c.error ? json(*c.error) : json(nullptr);
    rows.push_back(std::move(r));
  }
  return json{{"method", t.method}, {"folds", t.folds},          {"train_ratio", t.train_ratio},
              {"seed", t.seed},     {"metric", to_string(t.metric)}, {"candidates", rows},
              {"best_index", t.best_index}, {"best_params", params_json(t.best_params)},
              {"best_metric", t.best_metric}};
}

TextTable tune_table(const TuneResult& t) {
  TextTable table{{"Candidate", "Params", "Mean " + std::string(to_string(t.metric)), "Time"}, {}};
  for (std::size_t i = 0; i < t.table.size(); ++i) {
    const auto& c = t.table[i];
    table.rows.push_back({std::to_string(i) + (i == t.best_index ? "*" : ""), bookml::to_string(c.params),
                          c.error ? "failed" : fixed(c.mean), seconds_text(c.wall_seconds)});
  }
  return table;
}

std::vector<std::string> class_names(int num_classes) {
  if (num_classes == 2) return {"low(1-3)", "high(4-5)"};
  std::vector<std::string> names;
  for (int k = 1; k <= num_classes; ++k) names.push_back(std::to_string(k) + "-star");
  return names;
}

std::vector<std::uint64_t> class_counts(std::span<const int> y, int k) {
  std::vector<std::uint64_t> c(static_cast<std::size_t>(k), 0);
  for (int v : y) ++c[static_cast<std::size_t>(v)];
  return c;
}

struct SplitRows {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

SplitRows split_rows(const RunConfig& cfg, std::size_t n) {
  if (n < 2) throw_data("need at least 2 prepared rows to split");
  const auto mask = split_mask(n, 1.0 - cfg.test_fraction, derive_seed(cfg.seed, 2));
  SplitRows s;
  for (std::size_t r = 0; r < n; ++r) (mask[r] ? s.train : s.test).push_back(r);
  if (s.train.empty() || s.test.empty()) throw_data("train/test split left one side empty; add rows");
  return s;
}

TuneResult run_tuning(const RunConfig& cfg, ModelName m, const LabeledData& data) {
  const auto grid = effective_grid(m, cfg.grid_overrides);
  const auto trainer = make_trainer(m, cfg.seed);
  const auto seed = derive_seed(cfg.seed, 3);
  if (cfg.tuning == "cv") return cross_validate(trainer, grid, data, cfg.folds, cfg.metric, seed);
  return train_validation_split(trainer, grid, data, cfg.train_ratio, cfg.metric, seed);
}

std::string model_label(const RunConfig& cfg, ModelName m) {
  return display_name(m) + " (" + cfg.tuning + ")";
}

std::string label_mode_name(LabelMode m) { return m == LabelMode::Binary ? "binary" : "multiclass"; }

json split_json(const RunConfig& cfg, const SplitRows& s) {
  return json{{"protocol", "seeded random split"},
              {"test_fraction", cfg.test_fraction},
              {"train_rows", s.train.size()},
              {"test_rows", s.test.size()}};
}

// --- train: classifiers -----------------------------------------------------

TrainOutcome train_classifier(const RunConfig& cfg, std::ostream& log) {
  OutputDir out(cfg.command_dir("train"));
  const auto t_total = Clock::now();
  const Table prepared = load_prepared(cfg);
  const auto split = split_rows(cfg, prepared.row_count());
  const Table train = prepared.take(split.train);
  const Table test = prepared.take(split.test);
  const int k = cfg.label_mode == LabelMode::Binary ? 2 : 5;

  const auto stages = feature_stages(cfg, cfg.label_mode);
  auto [pipeline, train_features] = pipeline_fit_transform(stages, train);
  const Table test_features = pipeline.transform(test);
  const auto train_data = labeled_from_table(train_features, "features", "label", k);
  const auto test_data = labeled_from_table(test_features, "features", "label", k);
  log << "features: " << train_data.X.front().dimension() << " dims, " << train_data.size() << " train rows, "
      << test_data.size() << " test rows\n";

  const auto t_tune = Clock::now();
  TuneResult tune = run_tuning(cfg, cfg.model, train_data);
  const double tune_seconds = since(t_tune);
  const auto& clf = dynamic_cast<const ModelClassifier&>(*tune.best_model);
  const MetricsReport test_metrics = evaluate_classifier(clf, test_data);

  TrainOutcome o;
  o.dir = out.path();
  o.model_label = model_label(cfg, cfg.model);
  o.blocks = pipeline.block_map().value_or(BlockMap{});
  o.importances = importances_for(clf.model(), o.blocks);

  ModelBundle bundle{pipeline, clf.model(),
                     {{"label_mode", label_mode_name(cfg.label_mode)}, {"model", std::string(to_string(cfg.model))}}};
  out.write("model.json", bundle_to_json(bundle));

  json probes{{"kind", "classifier"}, {"rows", json::array()}, {"feature_hash", json::array()},
              {"label", json::array()}, {"score_bits", json::array()}};
  for (std::size_t i = 0; i < std::min(kMaxProbes, split.test.size()); ++i) {
    const auto& x = test_data.X[i];
    probes["rows"].push_back(split.test[i]);
    probes["feature_hash"].push_back(feature_hash(x));
    probes["label"].push_back(clf.predict(x));
    probes["score_bits"].push_back(std::bit_cast<std::uint64_t>(clf.score(x)));
  }
  out.write("probes.json", probes.dump());

  TextTable results = classification_table();
  add_classification_row(results, o.model_label, test_metrics, tune_seconds);
  std::string text = "Model: " + o.model_label + ", label mode " + label_mode_name(cfg.label_mode) + "\n";
  text += "Split: seeded " + fixed(100.0 * (1.0 - cfg.test_fraction), 0) + "/" + fixed(100.0 * cfg.test_fraction, 0) +
          " train/test (" + std::to_string(split.train.size()) + "/" + std::to_string(split.test.size()) + " rows)\n\n";
  text += results.render() + "\nTuning (" + tune.method + ", metric " + std::string(to_string(tune.metric)) + ")\n" +
          tune_table(tune).render() + "\nConfusion matrix (test)\n" +
          confusion_table(test_metrics, class_names(k)).render();

  json report{{"command", "train"},
              {"config", json::parse(config_to_json(cfg))},
              {"model", o.model_label},
              {"label_mode", label_mode_name(cfg.label_mode)},
              {"split", split_json(cfg, split)},
              {"class_balance_train", class_counts(train_data.y, k)},
              {"class_balance_test", class_counts(test_data.y, k)},
              {"feature_dimension", train_data.X.front().dimension()},
              {"tuning", tune_json(tune)},
              {"test_metrics", metrics_json(test_metrics)}};
  if (o.importances) {
    json blocks = json::array();
    for (std::size_t b = 0; b < o.blocks.size(); ++b) {
      blocks.push_back({{"block", o.blocks[b].name}, {"importance", o.importances->per_block[b]}});
    }
    report["feature_importances"] = {{"blocks", blocks}, {"degenerate", o.importances->degenerate}};
    text += "\nFeature importances\n" + importance_table(o.blocks, *o.importances).render();
    if (o.importances->degenerate) text += "(model has no splits; importances are all zero)\n";
  }
  report["timing"] = {{"tune_wall_seconds", tune_seconds}, {"total_wall_seconds", since(t_total)}};
  out.write("report.json", report.dump(2));
  out.write("report.txt", text);
  out.finish();

  o.tune = std::move(tune);
  o.test_metrics = test_metrics;
  o.report_text = std::move(text);
  log << o.report_text;
  return o;
}

// --- train: factor models -----------------------------------------------------

ALSConfig als_config(const RunConfig& cfg) {
  ALSConfig c;
  c.rank = cfg.als_rank;
  c.reg = cfg.als_reg;
  c.max_sweeps = cfg.als_sweeps;
  c.alpha = cfg.als_alpha;
  c.implicit = cfg.model == ModelName::AlsImplicit;
  c.seed = derive_seed(cfg.seed, 5);
  return c;
}

json factor_probes(const FactorModel& m, std::span<const RatedPair> test) {
  json pairs = json::array();
  for (std::size_t i = 0; i < std::min(kMaxProbes, test.size()); ++i) {
    pairs.push_back({{"user", test[i].user_id}, {"item", test[i].item_id},
                     {"score_bits", std::bit_cast<std::uint64_t>(score(m, test[i].user_id, test[i].item_id).value)}});
  }
  json top = json::array();
  for (std::size_t u = 0; u < std::min<std::size_t>(20, m.num_users()); ++u) {
    const auto rec = recommend_top_n(m, m.user_ids[u], 10, false, nullptr);
    json items = json::array();
    json bits = json::array();
    for (const auto& s : rec.items) {
      items.push_back(s.item_id);
      bits.push_back(std::bit_cast<std::uint64_t>(s.score));
    }
    top.push_back({{"user", m.user_ids[u]}, {"items", items}, {"score_bits", bits}});
  }
  return json{{"kind", "factor"}, {"pairs", pairs}, {"top", top}};
}

TrainOutcome train_factor(const RunConfig& cfg, std::ostream& log) {
  OutputDir out(cfg.command_dir("train"));
  const auto t0 = Clock::now();
  const Table prepared = load_prepared(cfg);
  const InteractionSet all = build_interactions(prepared, "user_id", "title", "r_score");
  const HoldoutSplit split = holdout_per_user(all, derive_seed(cfg.seed, 4));
  const ALSConfig als = als_config(cfg);
  const FactorModel model = als.implicit ? train_als_implicit(split.train, als) : train_als_explicit(split.train, als);
  const HoldoutEvaluation ev = evaluate_holdout(model, split.test);
  const double seconds = since(t0);

  TrainOutcome o;
  o.dir = out.path();
  o.model_label = display_name(cfg.model);
  o.holdout = ev;

  out.write("factor_model.json", factor_model_to_json(model));
  out.write("probes.json", factor_probes(model, split.test).dump());

  TextTable t{{"Model", "RMSE", "R2"}, {}};
  t.rows.push_back({o.model_label, fixed(ev.metrics.rmse), ev.metrics.r2 ? fixed(*ev.metrics.r2) : "n/a"});
  std::string text = "Protocol: one held-out rating per user with at least 2 ratings (" +
                     std::to_string(ev.evaluated) + " held out, " + std::to_string(ev.cold_start) +
                     " cold-start)\n\n" + t.render() + "\n" + std::string(kR2Note) + "\n";
  if (als.implicit) {
    text += "Implicit scores estimate preference in [0, 1], so RMSE and R2 against 1-5 ratings are expected to be "
            "poor.\n";
  }

  json report{{"command", "train"},
              {"config", json::parse(config_to_json(cfg))},
              {"model", o.model_label},
              {"interactions", {{"users", all.num_users()}, {"items", all.num_items()},
                                {"ratings", all.triples().size()}, {"duplicate_pairs", all.duplicates},
                                {"dropped_null", all.dropped_null}}},
              {"holdout", {{"protocol", "one rating per user with >= 2 ratings"}, {"evaluated", ev.evaluated},
                           {"cold_start", ev.cold_start}}},
              {"rmse", ev.metrics.rmse},
              {"r2", ev.metrics.r2 ? json(*ev.metrics.r2) : json(nullptr)},
              {"r2_definition", kR2Note},
              {"objective_trace", model.objective_trace},
              {"timing", {{"total_wall_seconds", seconds}}}};
  out.write("report.json", report.dump(2));
  out.write("report.txt", text);
  out.finish();
  o.report_text = std::move(text);
  log << o.report_text;
  return o;
}

// --- compare ------------------------------------------------------------------

std::vector<int> labels_for(const Table& t, LabelMode mode) {
  const auto& col = t.column("r_score");
  std::vector<int> y;
  y.reserve(t.row_count());
  for (std::size_t r = 0; r < t.row_count(); ++r) {
    const auto s = col.values<std::int64_t>()[r];
    y.push_back(mode == LabelMode::Binary ? binarize_label(s) : static_cast<int>(s - 1));
  }
  return y;
}

CompareRun compare_run(const RunConfig& cfg, LabelMode mode, const std::vector<FeatureVector>& x_train,
                       const std::vector<FeatureVector>& x_test, const Table& train, const Table& test) {
  CompareRun run;
  run.mode = label_mode_name(mode);
  const int k = mode == LabelMode::Binary ? 2 : 5;
  LabeledData tr{x_train, labels_for(train, mode), k};
  LabeledData te{x_test, labels_for(test, mode), k};
  const auto counts = class_counts(tr.y, k);
  run.classes_present = static_cast<std::size_t>(std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }));
  run.dominant_share = static_cast<double>(*std::max_element(counts.begin(), counts.end())) / double(tr.size());
  if (run.classes_present < 2) return run;

  const auto t0 = Clock::now();
  const auto tune = run_tuning(cfg, ModelName::Logistic, tr);
  run.seconds = since(t0);
  run.metrics = evaluate_classifier(*tune.best_model, te);
  run.best_params = tune.best_params;
  run.trained = true;
  return run;
}

json run_json(const CompareRun& r) {
  json j{{"mode", r.mode},
         {"trained", r.trained},
         {"classes_present", r.classes_present},
         {"dominant_class_share", r.dominant_share},
         {"wall_seconds", r.seconds}};
  j["metrics"] = r.metrics ? metrics_json(*r.metrics) : json(nullptr);
  j["best_params"] = r.best_params ? params_json(*r.best_params) : json(nullptr);
  return j;
}

}  // namespace

std::vector<StageSpec> feature_stages(const RunConfig& cfg, std::optional<LabelMode> labels) {
  std::vector<StageSpec> s;
  s.push_back(stage::MinMaxScaler{"price", "price_norm"});
  s.push_back(stage::MinMaxScaler{"r_time", "time_norm"});
  std::vector<std::string> inputs = {"price_norm", "time_norm"};
  const auto text = [&](const std::string& column, const std::string& prefix) {
    s.push_back(stage::Tokenizer{column, prefix + "_tokens"});
    s.push_back(stage::StopWordsRemover{prefix + "_tokens", prefix + "_words"});
    s.push_back(stage::CountVectorizer{prefix + "_words", prefix + "_counts", cfg.vocab_size, cfg.min_df});
    s.push_back(stage::Idf{prefix + "_counts", prefix + "_tfidf"});
    inputs.push_back(prefix + "_tfidf");
  };
  text("r_summary", "summary");
  if (cfg.use_review_text) text("r_review", "review");
  s.push_back(stage::VectorAssembler{inputs, "features"});
  if (labels) s.push_back(stage::Labeler{"r_score", "label", *labels});
  return s;
}

PrepareOutcome cmd_prepare(const RunConfig& cfg, std::ostream& log) {
  validate(cfg);
  apply_threads(cfg);
  if (cfg.ratings_path.empty() || cfg.books_path.empty()) throw_config("prepare needs ratings_path and books_path");
  OutputDir out(cfg.command_dir("prepare"));
  const auto t0 = Clock::now();
  IngestOptions opts;
  opts.max_malformed_fraction = cfg.max_malformed_fraction;
  const auto ratings = parse_csv(cfg.ratings_path, ratings_schema(), opts);
  const auto books = parse_csv(cfg.books_path, books_schema(), opts);
  auto prepared = prepare_tables(ratings.table, books.table, cfg.sample_rows, cfg.seed);
  auto& s = prepared.summary;
  s.ratings_records = ratings.records;
  s.ratings_malformed = ratings.malformed;
  s.books_records = books.records;
  s.books_malformed = books.malformed;

  const auto table_dir = cfg.prepared_dir();
  save_table(prepared.table, table_dir);

  const auto& scores = prepared.table.column("r_score").values<std::int64_t>();
  std::vector<std::uint64_t> balance(5, 0);
  for (auto v : scores) ++balance[static_cast<std::size_t>(v - 1)];

  json report{{"command", "prepare"},
              {"config", json::parse(config_to_json(cfg))},
              {"ratings", {{"records", s.ratings_records}, {"malformed", s.ratings_malformed}}},
              {"books", {{"records", s.books_records}, {"malformed", s.books_malformed},
                         {"duplicate_titles_dropped", s.duplicate_titles}}},
              {"rows", {{"in", s.rows_in},
                        {"kept", s.rows_kept},
                        {"dropped", {{"no_book_match", s.no_book_match},
                                     {"missing_price", s.missing_price},
                                     {"invalid_score", s.invalid_score},
                                     {"missing_summary", s.missing_summary},
                                     {"missing_time", s.missing_time},
                                     {"sampled_out", s.sampled_out}}}}},
              {"score_balance", balance},
              {"table_dir", table_dir.string()},
              {"timing", {{"total_wall_seconds", since(t0)}}}};
  TextTable t{{"Rows", "Count"}, {}};
  t.rows = {{"in", std::to_string(s.rows_in)},
            {"dropped: no book match", std::to_string(s.no_book_match)},
            {"dropped: missing price", std::to_string(s.missing_price)},
            {"dropped: invalid score", std::to_string(s.invalid_score)},
            {"dropped: missing summary", std::to_string(s.missing_summary)},
            {"dropped: missing time", std::to_string(s.missing_time)},
            {"dropped: sampled out", std::to_string(s.sampled_out)},
            {"kept", std::to_string(s.rows_kept)}};
  const std::string text = "Ratings records " + std::to_string(s.ratings_records) + " (" +
                           std::to_string(s.ratings_malformed) + " malformed), books records " +
                           std::to_string(s.books_records) + " (" + std::to_string(s.books_malformed) +
                           " malformed, " + std::to_string(s.duplicate_titles) + " duplicate titles)\n\n" + t.render();
  out.write("report.json", report.dump(2));
  out.write("report.txt", text);
  out.finish();
  log << text;
  return PrepareOutcome{s, table_dir};
}

TrainOutcome cmd_train(const RunConfig& cfg, std::ostream& log) {
  validate(cfg);
  apply_threads(cfg);
  // A classifier run must not leave a factor model behind, or vice versa.
  for (const char* stale : {"model.json", "factor_model.json", "probes.json"}) {
    std::error_code ec;
    std::filesystem::remove(cfg.command_dir("train") / stale, ec);
  }
  return is_factor_model(cfg.model) ? train_factor(cfg, log) : train_classifier(cfg, log);
}

CompareOutcome cmd_compare(const RunConfig& cfg, std::ostream& log) {
  validate(cfg);
  apply_threads(cfg);
  OutputDir out(cfg.command_dir("compare"));
  const Table prepared = load_prepared(cfg);
  const auto split = split_rows(cfg, prepared.row_count());
  const Table train = prepared.take(split.train);
  const Table test = prepared.take(split.test);
  auto [pipeline, train_features] = pipeline_fit_transform(feature_stages(cfg, std::nullopt), train);
  const Table test_features = pipeline.transform(test);
  const auto& x_train = train_features.column("features").values<FeatureVector>();
  const auto& x_test = test_features.column("features").values<FeatureVector>();

  CompareOutcome o;
  o.multiclass = compare_run(cfg, LabelMode::Multiclass, x_train, x_test, train, test);
  o.binary = compare_run(cfg, LabelMode::Binary, x_train, x_test, train, test);
  for (const auto* r : {&o.multiclass, &o.binary}) {
    if (r->classes_present < 2) {
      o.flags.push_back(r->mode + ": only one class present in training labels");
    } else if (r->dominant_share >= kDominanceThreshold) {
      o.flags.push_back(r->mode + ": one class holds " + fixed(100.0 * r->dominant_share, 1) + "% of training labels");
    }
  }
  o.inconclusive = !o.flags.empty();
  if (o.multiclass.trained && o.binary.trained) o.accuracy_delta = o.binary.metrics->accuracy - o.multiclass.metrics->accuracy;

  TextTable t = classification_table();
  std::string text = "Logistic regression on identical features, split and seed\n\n";
  for (const auto* r : {&o.multiclass, &o.binary}) {
    if (r->metrics) {
      add_classification_row(t, "Logistic Regression " + r->mode + " (" + cfg.tuning + ")", *r->metrics, r->seconds);
    } else {
      t.rows.push_back({"Logistic Regression " + r->mode + " (" + cfg.tuning + ")", "-", "-", "-", "-", "-"});
    }
  }
  text += t.render() + "\n";
  text += o.accuracy_delta ? "Accuracy delta (binary - multiclass): " + fixed(*o.accuracy_delta) + "\n"
                           : std::string("Accuracy delta: not available\n");
  text += std::string("Comparison: ") + (o.inconclusive ? "inconclusive" : "conclusive") + "\n";
  for (const auto& f : o.flags) text += "  flag: " + f + "\n";
  for (const auto* r : {&o.multiclass, &o.binary}) {
    if (!r->metrics) continue;
    text += "\nConfusion matrix (" + r->mode + ", test)\n" +
            confusion_table(*r->metrics, class_names(r->mode == "binary" ? 2 : 5)).render();
  }

  json report{{"command", "compare"},
              {"config", json::parse(config_to_json(cfg))},
              {"split", split_json(cfg, split)},
              {"multiclass", run_json(o.multiclass)},
              {"binary", run_json(o.binary)},
              {"accuracy_delta", o.accuracy_delta ? json(*o.accuracy_delta) : json(nullptr)},
              {"inconclusive", o.inconclusive},
              {"dominance_threshold", kDominanceThreshold},
              {"flags", o.flags}};
  out.write("report.json", report.dump(2));
  out.write("report.txt", text);
  out.finish();
  o.report_text = std::move(text);
  log << o.report_text;
  return o;
}

RecommendOutcome cmd_recommend(const RunConfig& cfg, std::ostream& log) {
  validate(cfg);
  apply_threads(cfg);
  if (cfg.user.empty()) throw_config("recommend needs a user id (--user)");
  const auto model_path = cfg.command_dir("train") / "factor_model.json";
  if (!std::filesystem::exists(model_path)) {
    throw_data("no factor model at " + model_path.string() + "; run `bookml train --model als` first");
  }
  OutputDir out(cfg.command_dir("recommend"));
  const FactorModel model = factor_model_from_json(read_file(model_path));
  std::optional<InteractionSet> seen;
  if (cfg.exclude_seen) seen = build_interactions(load_prepared(cfg), "user_id", "title", "r_score");
  const auto rec = recommend_top_n(model, cfg.user, cfg.top_n, cfg.exclude_seen, seen ? &*seen : nullptr);

  TextTable t{{"Rank", "Title", "Score"}, {}};
  json items = json::array();
  for (std::size_t i = 0; i < rec.items.size(); ++i) {
    t.rows.push_back({std::to_string(i + 1), rec.items[i].item_id, fixed(rec.items[i].score)});
    items.push_back({{"rank", i + 1}, {"title", rec.items[i].item_id}, {"score", rec.items[i].score}});
  }
  std::string text = "Top " + std::to_string(cfg.top_n) + " for user " + cfg.user;
  text += rec.cold_start ? " (cold start: unknown user, ranked by training popularity)\n" : "\n";
  text += t.render();
  json report{{"command", "recommend"},
              {"config", json::parse(config_to_json(cfg))},
              {"user", cfg.user},
              {"cold_start", rec.cold_start},
              {"score_kind", rec.cold_start ? "training interaction count" : "predicted rating"},
              {"items", items}};
  out.write("report.json", report.dump(2));
  out.write("report.txt", text);
  out.finish();
  log << text;
  return RecommendOutcome{rec, text};
}

VerifyOutcome cmd_verify_model(const RunConfig& cfg, std::ostream& log) {
  validate(cfg);
  apply_threads(cfg);
  const auto dir = cfg.command_dir("train");
  OutputDir out(cfg.command_dir("verify-model"));
  VerifyOutcome o;
  std::vector<std::string> problems;
  const auto check = [&](bool ok, const std::string& what) {
    ++o.probes;
    if (!ok) {
      ++o.mismatches;
      if (problems.size() < 20) problems.push_back(what);
    }
  };
  const auto load_probes = [&]() {
    try {
      return json::parse(read_file(dir / "probes.json"));
    } catch (const json::exception& e) {
      throw_data(std::string("corrupt probes.json: ") + e.what());
    }
  };

  if (std::filesystem::exists(dir / "model.json")) {
    o.artifacts.push_back("model.json");
    const std::string text = read_file(dir / "model.json");
    const ModelBundle bundle = bundle_from_json(text);
    const ModelBundle again = bundle_from_json(bundle_to_json(bundle));
    check(bundle_to_json(again) == bundle_to_json(bundle), "bundle re-serialization differs");

    const json probes = load_probes();
    try {
      const auto rows = probes.at("rows").get<std::vector<std::size_t>>();
      const Table prepared = load_prepared(cfg);
      for (auto r : rows) {
        if (r >= prepared.row_count()) throw_data("probe row outside the prepared table");
      }
      const Table features = bundle.pipeline.transform(prepared.take(rows)).select(std::vector<std::string>{"features"});
      const Table features_again = again.pipeline.transform(prepared.take(rows)).select(std::vector<std::string>{"features"});
      check(features == features_again, "pipeline transforms differ across a second round trip");
      const ModelClassifier clf(bundle.model);
      const auto& X = features.column("features").values<FeatureVector>();
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto tag = "probe row " + std::to_string(rows[i]);
        check(feature_hash(X[i]) == probes.at("feature_hash").at(i).get<std::uint64_t>(), tag + ": features differ");
        check(clf.predict(X[i]) == probes.at("label").at(i).get<int>(), tag + ": label differs");
        check(std::bit_cast<std::uint64_t>(clf.score(X[i])) == probes.at("score_bits").at(i).get<std::uint64_t>(),
              tag + ": score differs");
      }
    } catch (const json::exception& e) {
      throw_data(std::string("corrupt probes.json: ") + e.what());
    }
  }
  if (std::filesystem::exists(dir / "factor_model.json")) {
    o.artifacts.push_back("factor_model.json");
    const FactorModel m = factor_model_from_json(read_file(dir / "factor_model.json"));
    check(factor_model_to_json(factor_model_from_json(factor_model_to_json(m))) == factor_model_to_json(m),
          "factor model re-serialization differs");
    const json probes = load_probes();
    try {
      for (const auto& p : probes.at("pairs")) {
        const auto s = score(m, p.at("user").get<std::string>(), p.at("item").get<std::string>()).value;
        check(std::bit_cast<std::uint64_t>(s) == p.at("score_bits").get<std::uint64_t>(), "pair score differs");
      }
      for (const auto& t : probes.at("top")) {
        const auto rec = recommend_top_n(m, t.at("user").get<std::string>(), 10, false, nullptr);
        const auto& items = t.at("items");
        bool same = rec.items.size() == items.size();
        for (std::size_t i = 0; same && i < rec.items.size(); ++i) {
          same = rec.items[i].item_id == items.at(i).get<std::string>() &&
                 std::bit_cast<std::uint64_t>(rec.items[i].score) == t.at("score_bits").at(i).get<std::uint64_t>();
        }
        check(same, "top-n list differs for user " + t.at("user").get<std::string>());
      }
    } catch (const json::exception& e) {
      throw_data(std::string("corrupt probes.json: ") + e.what());
    }
  }
  if (o.artifacts.empty()) throw_data("no model artifacts in " + dir.string() + "; run `bookml train` first");

  json report{{"command", "verify-model"},
              {"artifacts", o.artifacts},
              {"checks", o.probes},
              {"mismatches", o.mismatches},
              {"problems", problems}};
  out.write("report.json", report.dump(2));
  std::string text = "Verified " + std::to_string(o.probes) + " checks over";
  for (const auto& a : o.artifacts) text += " " + a;
  text += ": " + std::to_string(o.mismatches) + " mismatches\n";
  for (const auto& p : problems) text += "  " + p + "\n";
  out.write("report.txt", text);
  log << text;
  if (o.mismatches > 0) throw_data("round trip mismatch: " + problems.front());
  out.finish();
  return o;
}

int exit_code(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    switch (err->kind()) {
      case ErrorKind::Config: return 2;
      case ErrorKind::Data: return 3;
      case ErrorKind::Numeric: return 4;
    }
  }
  if (dynamic_cast<const std::filesystem::filesystem_error*>(&e)) return 3;
  return 1;
}

}  // namespace bookml::app

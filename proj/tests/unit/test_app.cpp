#include "doctest.h"

#include <fstream>
#include <set>
#include <sstream>

#include "bookml/app/commands.hpp"
#include "bookml/app/config.hpp"
#include "bookml/app/data.hpp"
#include "bookml/app/report.hpp"
#include "bookml/app/synth.hpp"
#include "bookml/error.hpp"
#include "bookml/table_io.hpp"
#include "json.hpp"
#include "test_support.hpp"

using namespace bookml;
using namespace bookml::app;
using json = nlohmann::json;

namespace {

// One 5000-row synthetic dataset shared by the command tests.
struct Fixture {
  testing::TempDir dir{"app"};
  RunConfig base;

  Fixture() {
    SynthOptions opts;
    opts.rows = 5000;
    opts.books = 600;
    opts.users = 800;
    opts.review_words = 10;
    write_synthetic_files(opts, dir / "ratings.csv", dir / "books.csv");
    base.ratings_path = dir / "ratings.csv";
    base.books_path = dir / "books.csv";
    base.out = dir / "out";
    base.vocab_size = 200;
    base.grid_overrides.axes["l2_reg"] = {0.01};
    base.grid_overrides.axes["max_iters"] = {std::int64_t{60}};
    std::ostringstream log;
    cmd_prepare(base, log);
  }
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

RunConfig run_in(const std::string& name) {
  RunConfig cfg = fixture().base;
  cfg.prepared = cfg.prepared_dir();
  cfg.out = fixture().dir / name;
  return cfg;
}

json without_times(json j) {
  if (j.is_object()) {
    json out = json::object();
    for (auto& [k, v] : j.items()) {
      if (k.find("seconds") == std::string::npos) out[k] = without_times(v);
    }
    return out;
  }
  if (j.is_array()) {
    for (auto& v : j) v = without_times(v);
  }
  return j;
}

json read_json(const std::filesystem::path& p) { return json::parse(read_file(p)); }

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Config;
}

Table ratings_table(std::vector<std::string> titles, std::vector<std::string> prices) {
  const auto n = titles.size();
  auto text = [&](std::string v) { return Column(std::vector<std::string>(n, v)); };
  const auto rs = ratings_schema();
  std::vector<Column> cols;
  for (const auto& spec : rs.columns()) {
    if (spec.name == "title") cols.push_back(Column(titles));
    else if (spec.name == "price") cols.push_back(Column(prices));
    else if (spec.dtype == DType::Int64) cols.push_back(Column(std::vector<std::int64_t>(n, 4)));
    else cols.push_back(text("x"));
  }
  return Table(rs, std::move(cols));
}

Table books_table(std::vector<std::string> titles) {
  const auto bs = books_schema();
  std::vector<Column> cols;
  for (const auto& spec : bs.columns()) {
    if (spec.name == "title") cols.push_back(Column(titles));
    else if (spec.dtype == DType::Int64) cols.push_back(Column(std::vector<std::int64_t>(titles.size(), 1)));
    else cols.push_back(Column(std::vector<std::string>(titles.size(), "y")));
  }
  return Table(bs, std::move(cols));
}

}  // namespace

TEST_CASE("config parsing and validation") {
  const auto cfg = config_from_json(R"({"model": "svc", "label_mode": "binary", "folds": 5, "seed": 9,
                                        "grid": {"l2_reg": [0.5]}})");
  CHECK(cfg.model == ModelName::Svc);
  CHECK(cfg.label_mode == LabelMode::Binary);
  CHECK(cfg.folds == 5);
  CHECK(cfg.seed == 9);
  CHECK(cfg.grid_overrides.axes.at("l2_reg").size() == 1);
  validate(cfg);

  CHECK(kind_of([] { config_from_json(R"({"colour": 1})"); }) == ErrorKind::Config);
  CHECK(kind_of([] { config_from_json(R"({"folds": "three"})"); }) == ErrorKind::Config);
  CHECK(kind_of([] { config_from_json("{"); }) == ErrorKind::Config);
  CHECK(kind_of([] { config_from_json(R"({"model": "knn"})"); }) == ErrorKind::Config);

  RunConfig bad;
  bad.model = ModelName::Gbt;
  CHECK(kind_of([&] { validate(bad); }) == ErrorKind::Config);
  bad.model = ModelName::Svc;
  CHECK(kind_of([&] { validate(bad); }) == ErrorKind::Config);

  // The echo is complete: parsing it back reproduces the same echo.
  const auto echo = config_to_json(cfg);
  const auto j = json::parse(echo);
  for (const char* key : {"folds", "train_ratio", "test_fraction", "tuning", "seed", "grid", "vocab_size"}) {
    CHECK(j.contains(key));
  }
  CHECK(config_to_json(config_from_json(echo)) == echo);
}

TEST_CASE("price parsing") {
  CHECK(parse_price("19.99") == 19.99);
  CHECK(parse_price(" 5 ") == 5.0);
  CHECK_FALSE(parse_price("").has_value());
  CHECK_FALSE(parse_price("abc").has_value());
  CHECK_FALSE(parse_price("-1").has_value());
  CHECK_FALSE(parse_price("nan").has_value());
  CHECK_FALSE(parse_price("1e400").has_value());
}

TEST_CASE("prepare coerces prices and balances its accounting") {
  const auto ratings = ratings_table({"A", "B", "C", "A"}, {"19.99", "", "3", "oops"});
  const auto books = books_table({"A", "B", "A"});
  const auto p = prepare_tables(ratings, books, std::nullopt, 1);
  CHECK(p.summary.rows_in == 4);
  CHECK(p.summary.rows_kept == 1);
  CHECK(p.summary.no_book_match == 1);
  CHECK(p.summary.missing_price == 2);
  CHECK(p.summary.duplicate_titles == 1);
  CHECK(p.table.column("price").values<double>() == std::vector<double>{19.99});

  CHECK(kind_of([&] { prepare_tables(ratings, books_table({"Z"}), std::nullopt, 1); }) == ErrorKind::Data);
}

TEST_CASE("seeded sampling keeps exactly the requested rows") {
  auto& f = fixture();
  RunConfig cfg = f.base;
  cfg.sample_rows = 1000;
  cfg.out = f.dir / "sample-a";
  std::ostringstream log;
  const auto a = cmd_prepare(cfg, log);
  cfg.out = f.dir / "sample-b";
  const auto b = cmd_prepare(cfg, log);
  CHECK(a.summary.rows_kept == 1000);
  const auto ta = load_table(a.table_dir), tb = load_table(b.table_dir);
  CHECK(ta.row_count() == 1000);
  CHECK(ta == tb);

  const auto& s = a.summary;
  CHECK(s.rows_in == s.rows_kept + s.no_book_match + s.missing_price + s.invalid_score + s.missing_summary +
                         s.missing_time + s.sampled_out);
  CHECK(s.rows_in == 5000);
  CHECK(std::filesystem::exists(cfg.command_dir("prepare") / "_SUCCESS"));
}

TEST_CASE("training reports are deterministic") {
  auto cfg = run_in("train-a");
  cfg.label_mode = LabelMode::Binary;
  cfg.model = ModelName::Svc;
  std::ostringstream log;
  const auto a = cmd_train(cfg, log);
  const auto ja = read_json(a.dir / "report.json");
  const auto model_a = read_file(a.dir / "model.json");
  const auto text_a = read_file(a.dir / "report.txt");
  // Same config and seed into the same directory.
  const auto b = cmd_train(cfg, log);
  CHECK(without_times(ja).dump() == without_times(read_json(b.dir / "report.json")).dump());
  CHECK(model_a == read_file(b.dir / "model.json"));
  CHECK(std::filesystem::exists(b.dir / "_SUCCESS"));
  for (const char* col : {"Model", "Accuracy", "Precision", "Recall", "F1", "Time"}) {
    CHECK(text_a.find(col) != std::string::npos);
  }
  CHECK(ja.contains("config"));

  // A different output directory changes only the echoed path.
  cfg.out = fixture().dir / "train-b";
  const auto c = cmd_train(cfg, log);
  auto jc = without_times(read_json(c.dir / "report.json"));
  jc["config"]["out"] = ja["config"]["out"];
  CHECK(without_times(ja).dump() == jc.dump());
}

TEST_CASE("invalid model and label combinations are rejected before work") {
  auto cfg = run_in("train-bad");
  cfg.model = ModelName::Gbt;
  std::ostringstream log;
  CHECK(kind_of([&] { cmd_train(cfg, log); }) == ErrorKind::Config);
  CHECK_FALSE(std::filesystem::exists(cfg.command_dir("train") / "_SUCCESS"));
}

TEST_CASE("tree models report block importances") {
  auto cfg = run_in("train-forest");
  cfg.model = ModelName::RandomForest;
  cfg.grid_overrides.axes.clear();
  cfg.grid_overrides.axes["num_trees"] = {std::int64_t{5}};
  cfg.grid_overrides.axes["max_depth"] = {std::int64_t{4}};
  std::ostringstream log;
  const auto out = cmd_train(cfg, log);
  REQUIRE(out.importances.has_value());
  double sum = 0;
  for (double v : out.importances->per_block) {
    CHECK(v >= 0.0);
    sum += v;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(out.report_text.find("Importance") != std::string::npos);

  cfg.out = fixture().dir / "train-forest";
  const auto v = cmd_verify_model(cfg, log);
  CHECK(v.probes > 0);
  CHECK(v.mismatches == 0);
}

TEST_CASE("compare puts binary and multiclass side by side") {
  auto cfg = run_in("compare");
  std::ostringstream log;
  const auto c = cmd_compare(cfg, log);
  CHECK(c.multiclass.trained);
  CHECK(c.binary.trained);
  REQUIRE(c.accuracy_delta.has_value());
  CHECK(*c.accuracy_delta == doctest::Approx(c.binary.metrics->accuracy - c.multiclass.metrics->accuracy));
  CHECK(c.report_text.find("Confusion matrix (multiclass") != std::string::npos);
  CHECK(c.report_text.find("Confusion matrix (binary") != std::string::npos);
}

TEST_CASE("compare on single-score data is inconclusive") {
  testing::TempDir dir("five");
  SynthOptions opts;
  opts.rows = 600;
  opts.books = 100;
  opts.users = 100;
  opts.fixed_score = 5;
  write_synthetic_files(opts, dir / "r.csv", dir / "b.csv");
  RunConfig cfg;
  cfg.ratings_path = dir / "r.csv";
  cfg.books_path = dir / "b.csv";
  cfg.out = dir / "out";
  cfg.vocab_size = 50;
  std::ostringstream log;
  cmd_prepare(cfg, log);
  const auto c = cmd_compare(cfg, log);
  CHECK(c.inconclusive);
  CHECK(c.multiclass.dominant_share >= kDominanceThreshold);
  CHECK(c.binary.dominant_share >= kDominanceThreshold);
  CHECK_FALSE(c.accuracy_delta.has_value());
}

TEST_CASE("ALS training, recommendation and verification") {
  auto cfg = run_in("als");
  cfg.model = ModelName::Als;
  cfg.als_sweeps = 4;
  std::ostringstream log;
  const auto t = cmd_train(cfg, log);
  REQUIRE(t.holdout.has_value());
  CHECK(t.report_text.find("RMSE") != std::string::npos);
  CHECK(t.report_text.find("SS_res") != std::string::npos);

  const auto prepared = load_table(cfg.prepared_dir());
  const auto all = build_interactions(prepared, "user_id", "title", "r_score");
  std::set<std::string> rated;
  const std::string user = all.user_ids()[0];
  const auto u = *all.user_index(user);
  for (const auto& tr : all.triples()) {
    if (tr.user == u) rated.insert(all.item_ids()[tr.item]);
  }
  cfg.user = user;
  cfg.top_n = 5;
  const auto r = cmd_recommend(cfg, log);
  CHECK(r.recommendation.items.size() <= 5);
  CHECK_FALSE(r.recommendation.cold_start);
  for (std::size_t i = 1; i < r.recommendation.items.size(); ++i) {
    CHECK(r.recommendation.items[i].score <= r.recommendation.items[i - 1].score);
  }
  for (const auto& item : r.recommendation.items) CHECK(rated.count(item.item_id) == 0);

  cfg.user = "no such user";
  CHECK(cmd_recommend(cfg, log).recommendation.cold_start);

  const auto v = cmd_verify_model(cfg, log);
  CHECK(v.mismatches == 0);
  CHECK(v.probes > 0);

  // A truncated artifact fails cleanly as a data error.
  const auto model_path = cfg.command_dir("train") / "factor_model.json";
  const auto text = read_file(model_path);
  std::ofstream(model_path, std::ios::trunc) << text.substr(0, text.size() / 2);
  CHECK(kind_of([&] { cmd_verify_model(cfg, log); }) == ErrorKind::Data);
}

TEST_CASE("exit codes follow the error class") {
  CHECK(exit_code(Error(ErrorKind::Config, "x")) == 2);
  CHECK(exit_code(Error(ErrorKind::Data, "x")) == 3);
  CHECK(exit_code(Error(ErrorKind::Numeric, "x")) == 4);
}

TEST_CASE("text tables align columns") {
  TextTable t{{"Model", "F1"}, {}};
  t.rows.push_back({"Logistic Regression", "0.5"});
  t.rows.push_back({"GBT", "0.75"});
  std::istringstream lines(t.render());
  std::string line;
  std::vector<std::string> all;
  while (std::getline(lines, line)) all.push_back(line);
  REQUIRE(all.size() >= 3);
  CHECK(all[0].rfind("Model", 0) == 0);
  // Right-aligned numeric column: every row ends at the same width.
  CHECK(all[1].size() == all[2].size());
  CHECK(all.back().back() != ' ');
}

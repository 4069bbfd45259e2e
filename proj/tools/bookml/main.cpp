#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "bookml/app/commands.hpp"
#include "bookml/app/synth.hpp"
#include "bookml/error.hpp"

namespace {

using bookml::app::RunConfig;

// Flags given on the command line; each one overrides the config file.
struct Flags {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> sample_rows;
  std::optional<std::string> ratings, books, prepared, model, label_mode, tuning, metric, user;
  std::optional<std::size_t> folds, threads, vocab_size, min_df, top_n, rank, sweeps;
  std::optional<double> train_ratio, test_fraction, reg, alpha;
  bool review_text = false;
  bool include_seen = false;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON config file; flags override its values");
  cmd->add_option("--seed", f.seed, "Seed for every random choice");
  cmd->add_option("--out", f.out, "Output root directory");
  cmd->add_option("--sample-rows", f.sample_rows, "Keep a seeded sample of this many prepared rows");
  cmd->add_option("--prepared", f.prepared, "Prepared table directory (default <out>/prepare/table)");
  cmd->add_option("--threads", f.threads, "Worker threads (default: hardware concurrency)");
}

void add_training(CLI::App* cmd, Flags& f) {
  cmd->add_option("--model", f.model, "logistic, svc, dtree, rforest, gbt, als or als_implicit");
  cmd->add_option("--label-mode", f.label_mode, "multiclass or binary");
  cmd->add_option("--tuning", f.tuning, "cv or tvs");
  cmd->add_option("--folds", f.folds, "Folds for cv");
  cmd->add_option("--train-ratio", f.train_ratio, "Train share for tvs");
  cmd->add_option("--test-fraction", f.test_fraction, "Held-out test share");
  cmd->add_option("--metric", f.metric, "Selection metric: f1, accuracy, precision or recall");
  cmd->add_option("--vocab-size", f.vocab_size, "Count vectorizer vocabulary size");
  cmd->add_option("--min-df", f.min_df, "Minimum document frequency for vocabulary terms");
  cmd->add_flag("--review-text", f.review_text, "Add the review text as a second tf-idf block");
  cmd->add_option("--rank", f.rank, "ALS rank");
  cmd->add_option("--reg", f.reg, "ALS regularization");
  cmd->add_option("--sweeps", f.sweeps, "ALS sweeps");
  cmd->add_option("--alpha", f.alpha, "Implicit ALS confidence scale");
}

RunConfig resolve(const Flags& f) {
  RunConfig c = f.config ? bookml::app::load_config(*f.config) : RunConfig{};
  if (f.seed) c.seed = *f.seed;
  if (f.out) c.out = *f.out;
  if (f.sample_rows) c.sample_rows = *f.sample_rows;
  if (f.ratings) c.ratings_path = *f.ratings;
  if (f.books) c.books_path = *f.books;
  if (f.prepared) c.prepared = *f.prepared;
  if (f.threads) c.threads = *f.threads;
  if (f.model) c.model = bookml::app::model_from_string(*f.model);
  if (f.label_mode) {
    if (*f.label_mode == "binary") {
      c.label_mode = bookml::LabelMode::Binary;
    } else if (*f.label_mode == "multiclass") {
      c.label_mode = bookml::LabelMode::Multiclass;
    } else {
      bookml::throw_config("--label-mode must be multiclass or binary");
    }
  }
  if (f.tuning) c.tuning = *f.tuning;
  if (f.folds) c.folds = *f.folds;
  if (f.train_ratio) c.train_ratio = *f.train_ratio;
  if (f.test_fraction) c.test_fraction = *f.test_fraction;
  if (f.metric) c.metric = bookml::metric_from_string(*f.metric);
  if (f.vocab_size) c.vocab_size = *f.vocab_size;
  if (f.min_df) c.min_df = *f.min_df;
  if (f.review_text) c.use_review_text = true;
  if (f.rank) c.als_rank = *f.rank;
  if (f.reg) c.als_reg = *f.reg;
  if (f.sweeps) c.als_sweeps = *f.sweeps;
  if (f.alpha) c.als_alpha = *f.alpha;
  if (f.user) c.user = *f.user;
  if (f.top_n) c.top_n = *f.top_n;
  if (f.include_seen) c.exclude_seen = false;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bookml: book review rating prediction and recommendation"};
  app.require_subcommand(1);
  Flags f;

  auto* prepare = app.add_subcommand("prepare", "Parse, join and clean the two CSV files");
  add_common(prepare, f);
  prepare->add_option("--ratings", f.ratings, "Ratings CSV (Books_rating.csv layout)");
  prepare->add_option("--books", f.books, "Books CSV (books_data.csv layout)");

  auto* train = app.add_subcommand("train", "Fit the feature pipeline and a tuned model");
  add_common(train, f);
  add_training(train, f);

  auto* compare = app.add_subcommand("compare", "Logistic regression, multiclass against binary labels");
  add_common(compare, f);
  add_training(compare, f);

  auto* recommend = app.add_subcommand("recommend", "Top-n titles for a user from the trained factor model");
  add_common(recommend, f);
  recommend->add_option("--user", f.user, "User id");
  recommend->add_option("-n,--top-n", f.top_n, "Number of titles");
  recommend->add_flag("--include-seen", f.include_seen, "Allow titles the user already rated");

  auto* verify = app.add_subcommand("verify-model", "Round-trip the trained artifacts and compare probe outputs");
  add_common(verify, f);

  bookml::app::SynthOptions synth_opts;
  std::string synth_dir = "synthetic";
  int fixed_score = 0;
  auto* synth = app.add_subcommand("synth", "Write a seeded synthetic ratings/books CSV pair");
  synth->add_option("--out", synth_dir, "Directory for ratings.csv and books.csv");
  synth->add_option("--seed", synth_opts.seed, "Generator seed");
  synth->add_option("--rows", synth_opts.rows, "Rating records");
  synth->add_option("--books", synth_opts.books, "Book records");
  synth->add_option("--users", synth_opts.users, "Distinct users");
  synth->add_option("--correlation", synth_opts.correlation, "Chance a review word carries the score's polarity");
  synth->add_option("--malformed", synth_opts.malformed_fraction, "Share of records written with a missing field");
  synth->add_option("--review-words", synth_opts.review_words, "Words per review text");
  synth->add_option("--fixed-score", fixed_score, "Give every rating this score (1-5)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    std::ostream& log = std::cout;
    if (synth->parsed()) {
      if (fixed_score != 0) synth_opts.fixed_score = fixed_score;
      const std::filesystem::path dir = synth_dir;
      const auto s = bookml::app::write_synthetic_files(synth_opts, dir / "ratings.csv", dir / "books.csv");
      log << "wrote " << s.rating_records << " ratings (" << s.malformed_records << " malformed) and "
          << s.book_records << " books to " << dir.string() << "\n";
      return 0;
    }
    const RunConfig cfg = resolve(f);
    if (prepare->parsed()) bookml::app::cmd_prepare(cfg, log);
    if (train->parsed()) bookml::app::cmd_train(cfg, log);
    if (compare->parsed()) bookml::app::cmd_compare(cfg, log);
    if (recommend->parsed()) bookml::app::cmd_recommend(cfg, log);
    if (verify->parsed()) bookml::app::cmd_verify_model(cfg, log);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "bookml: " << e.what() << "\n";
    return bookml::app::exit_code(e);
  }
}

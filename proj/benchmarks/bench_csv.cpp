#include <benchmark/benchmark.h>

#include <sstream>

#include "bookml/app/data.hpp"
#include "bookml/app/synth.hpp"
#include "bookml/csv.hpp"
#include "bookml/features.hpp"

namespace {

std::string ratings_text(std::size_t rows) {
  bookml::app::SynthOptions opts;
  opts.rows = rows;
  std::ostringstream ratings, books;
  bookml::app::write_synthetic(opts, ratings, books);
  return ratings.str();
}

void BM_ParseRatings(benchmark::State& state) {
  const auto text = ratings_text(static_cast<std::size_t>(state.range(0)));
  const auto schema = bookml::app::ratings_schema();
  for (auto _ : state) {
    auto r = bookml::parse_csv_text(text, schema);
    benchmark::DoNotOptimize(r.records);
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseRatings)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_TokenizeAndCount(benchmark::State& state) {
  const auto text = ratings_text(5000);
  const auto parsed = bookml::parse_csv_text(text, bookml::app::ratings_schema());
  const auto& reviews = parsed.table.column("r_review").values<std::string>();
  std::vector<bookml::Tokens> docs;
  for (const auto& r : reviews) docs.push_back(bookml::tokenize(r));
  for (auto _ : state) {
    auto vocab = bookml::fit_count_vectorizer(docs, 1000, 2);
    std::size_t nnz = 0;
    for (const auto& d : docs) nnz += bookml::transform_counts(vocab, d).stored();
    benchmark::DoNotOptimize(nnz);
  }
}
BENCHMARK(BM_TokenizeAndCount)->Unit(benchmark::kMillisecond);

}  // namespace

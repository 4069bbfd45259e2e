#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "bookml/table.hpp"

namespace bookml::app {

// Column layouts of the two input files. Headers match either the short
// names used here or the headers of the public Kaggle export.
Schema ratings_schema();
Schema books_schema();

struct PrepareSummary {
  std::size_t ratings_records = 0;
  std::size_t ratings_malformed = 0;
  std::size_t books_records = 0;
  std::size_t books_malformed = 0;
  std::size_t duplicate_titles = 0;  // book rows dropped, first title wins

  // rows_in == rows_kept + every drop counter below.
  std::size_t rows_in = 0;
  std::size_t no_book_match = 0;
  std::size_t missing_price = 0;
  std::size_t invalid_score = 0;
  std::size_t missing_summary = 0;
  std::size_t missing_time = 0;
  std::size_t sampled_out = 0;
  std::size_t rows_kept = 0;
};

struct Prepared {
  Table table;
  PrepareSummary summary;
};

// Joins ratings to books on title, coerces price to float64 and drops rows
// that cannot feed the feature pipeline. Each dropped row is counted under
// the first reason that applies, in the order of the counters above. With
// sample_rows set, a seeded subset of exactly that many rows is kept in
// original order.
Prepared prepare_tables(const Table& ratings, const Table& books, std::optional<std::size_t> sample_rows,
                        std::uint64_t seed);

// Plain decimal such as "19.99"; surrounding spaces are ignored.
std::optional<double> parse_price(std::string_view text);

}  // namespace bookml::app

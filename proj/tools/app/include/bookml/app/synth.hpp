#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>

namespace bookml::app {

// Seeded generator for ratings/books CSV pairs in the Kaggle header layout.
// Review words are drawn from a polarity pool matching the score with
// probability `correlation`, otherwise from neutral vocabulary. Titles and
// review texts contain quoted commas, doubled quotes and line breaks.
struct SynthOptions {
  std::size_t rows = 20000;  // rating records, malformed ones included
  std::size_t books = 2000;
  std::size_t users = 4000;
  double correlation = 0.6;
  double missing_price_fraction = 0.02;
  double unmatched_title_fraction = 0.01;  // ratings whose title has no book row
  double malformed_fraction = 0.0;         // records written with a missing field
  std::size_t review_words = 24;
  std::optional<int> fixed_score;  // every rating gets this score
  std::uint64_t seed = 7;
};

struct SynthStats {
  std::size_t rating_records = 0;
  std::size_t malformed_records = 0;
  std::size_t book_records = 0;
  std::size_t missing_price = 0;
  std::size_t unmatched_title = 0;
};

SynthStats write_synthetic(const SynthOptions& opts, std::ostream& ratings, std::ostream& books);
SynthStats write_synthetic_files(const SynthOptions& opts, const std::filesystem::path& ratings,
                                 const std::filesystem::path& books);

}  // namespace bookml::app

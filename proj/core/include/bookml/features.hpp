#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "bookml/feature_vector.hpp"
#include "bookml/table.hpp"

namespace bookml {

// --- text ------------------------------------------------------------------

// Lowercases and splits on runs of whitespace. Punctuation stays inside tokens.
Tokens tokenize(std::optional<std::string_view> text);

using StopList = std::unordered_set<std::string>;

Tokens remove_stopwords(const Tokens& tokens, const StopList& stoplist);

// Fixed 181-word English list shipped with the library.
const std::vector<std::string>& default_stopwords();
StopList default_stoplist();

// Terms in ranked order with per-term document frequencies.
class Vocabulary {
 public:
  Vocabulary() = default;
  // Validates uniqueness and 1 <= doc_freq[i] <= corpus_size.
  Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> doc_freq,
             std::size_t corpus_size);

  const std::vector<std::string>& terms() const noexcept { return terms_; }
  const std::vector<std::size_t>& doc_freq() const noexcept { return doc_freq_; }
  std::size_t corpus_size() const noexcept { return corpus_size_; }
  std::size_t size() const noexcept { return terms_.size(); }

  std::optional<std::size_t> index_of(std::string_view term) const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.terms_ == b.terms_ && a.doc_freq_ == b.doc_freq_ && a.corpus_size_ == b.corpus_size_;
  }

 private:
  std::vector<std::string> terms_;
  std::vector<std::size_t> doc_freq_;
  std::size_t corpus_size_ = 0;
  std::unordered_map<std::string, std::size_t> index_;
};

// Keeps the vocab_size terms with the highest total term frequency among
// terms seen in at least min_df documents. Ties go to the lexicographically
// smaller term.
Vocabulary fit_count_vectorizer(std::span<const Tokens> docs, std::size_t vocab_size,
                                std::size_t min_df);

// Raw counts over vocabulary order; unknown tokens are ignored.
FeatureVector transform_counts(const Vocabulary& vocab, const Tokens& tokens);

// ln((N + 1) / (df + 1)): nonnegative, and zero for a term present in every document.
std::vector<double> idf_weights(const Vocabulary& vocab);
std::vector<double> idf_weights(std::span<const std::size_t> doc_freq, std::size_t corpus_size);

FeatureVector transform_tfidf(const FeatureVector& counts, std::span<const double> weights);

// --- numeric ---------------------------------------------------------------

struct MinMaxState {
  double min = 0.0;
  double max = 0.0;
  friend bool operator==(const MinMaxState&, const MinMaxState&) = default;
};

MinMaxState fit_minmax(const Table& t, std::string_view col);
// Constant ranges map to 0.5. No clamping outside the fitted range.
double transform_minmax(const MinMaxState& state, double x);

// Ratings 1..3 map to 0, 4..5 map to 1.
int binarize_label(long long score);

// --- assembly --------------------------------------------------------------

using FeaturePart = std::variant<double, FeatureVector>;

struct Block {
  std::string name;
  std::size_t offset = 0;
  std::size_t length = 0;
  friend bool operator==(const Block&, const Block&) = default;
};
using BlockMap = std::vector<Block>;

// Concatenates parts in order into one sparse vector. A scalar counts as a
// part of length 1.
FeatureVector assemble(std::span<const FeaturePart> parts);

BlockMap make_block_map(std::span<const std::string> names, std::span<const FeaturePart> parts);

// Recovers block `b` from an assembled vector.
FeatureVector slice_block(const FeatureVector& assembled, const Block& b);

}  // namespace bookml

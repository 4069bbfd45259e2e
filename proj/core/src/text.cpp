#include <algorithm>
#include <cctype>
#include <cmath>

#include "bookml/error.hpp"
#include "bookml/features.hpp"

namespace bookml {

Tokens tokenize(std::optional<std::string_view> text) {
  Tokens out;
  if (!text) return out;
  std::string current;
  for (unsigned char c : *text) {
    if (std::isspace(c)) {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

Tokens remove_stopwords(const Tokens& tokens, const StopList& stoplist) {
  Tokens out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (!stoplist.contains(t)) out.push_back(t);
  }
  return out;
}

Vocabulary::Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> doc_freq,
                       std::size_t corpus_size)
    : terms_(std::move(terms)), doc_freq_(std::move(doc_freq)), corpus_size_(corpus_size) {
  if (terms_.size() != doc_freq_.size()) throw_data("vocabulary: terms/doc_freq length mismatch");
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (doc_freq_[i] < 1 || doc_freq_[i] > corpus_size_) {
      throw_data("vocabulary: doc_freq of '" + terms_[i] + "' outside [1, corpus size]");
    }
    if (!index_.emplace(terms_[i], i).second) throw_data("vocabulary: duplicate term '" + terms_[i] + "'");
  }
}

std::optional<std::size_t> Vocabulary::index_of(std::string_view term) const {
  const auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vocabulary fit_count_vectorizer(std::span<const Tokens> docs, std::size_t vocab_size,
                                std::size_t min_df) {
  if (docs.empty()) throw_data("count vectorizer: empty corpus");
  if (vocab_size == 0 || min_df == 0) throw_config("count vectorizer: vocab_size and min_df must be positive");

  struct Counts {
    std::size_t tf = 0;
    std::size_t df = 0;
    std::size_t last_doc = static_cast<std::size_t>(-1);
  };
  std::unordered_map<std::string, Counts> counts;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (const auto& tok : docs[d]) {
      auto& c = counts[tok];
      ++c.tf;
      if (c.last_doc != d) {
        ++c.df;
        c.last_doc = d;
      }
    }
  }

  std::vector<std::pair<const std::string*, const Counts*>> kept;
  for (const auto& [term, c] : counts) {
    if (c.df >= min_df) kept.emplace_back(&term, &c);
  }
  const auto better = [](const auto& a, const auto& b) {
    if (a.second->tf != b.second->tf) return a.second->tf > b.second->tf;
    return *a.first < *b.first;
  };
  const auto n = std::min(vocab_size, kept.size());
  std::partial_sort(kept.begin(), kept.begin() + static_cast<std::ptrdiff_t>(n), kept.end(), better);

  std::vector<std::string> terms;
  std::vector<std::size_t> df;
  terms.reserve(n);
  df.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    terms.push_back(*kept[i].first);
    df.push_back(kept[i].second->df);
  }
  return Vocabulary(std::move(terms), std::move(df), docs.size());
}

FeatureVector transform_counts(const Vocabulary& vocab, const Tokens& tokens) {
  std::vector<std::uint32_t> idx;
  for (const auto& t : tokens) {
    if (auto i = vocab.index_of(t)) idx.push_back(static_cast<std::uint32_t>(*i));
  }
  std::sort(idx.begin(), idx.end());
  std::vector<std::uint32_t> uniq;
  std::vector<double> vals;
  for (std::size_t k = 0; k < idx.size();) {
    std::size_t j = k;
    while (j < idx.size() && idx[j] == idx[k]) ++j;
    uniq.push_back(idx[k]);
    vals.push_back(static_cast<double>(j - k));
    k = j;
  }
  return FeatureVector::sparse(vocab.size(), std::move(uniq), std::move(vals));
}

std::vector<double> idf_weights(std::span<const std::size_t> doc_freq, std::size_t corpus_size) {
  if (corpus_size < 1) throw_data("idf: corpus size must be at least 1");
  std::vector<double> w(doc_freq.size());
  const double n1 = static_cast<double>(corpus_size) + 1.0;
  for (std::size_t i = 0; i < doc_freq.size(); ++i) {
    w[i] = std::log(n1 / (static_cast<double>(doc_freq[i]) + 1.0));
  }
  return w;
}

std::vector<double> idf_weights(const Vocabulary& vocab) {
  return idf_weights(vocab.doc_freq(), vocab.corpus_size());
}

FeatureVector transform_tfidf(const FeatureVector& counts, std::span<const double> weights) {
  if (counts.dimension() != weights.size()) throw_data("tfidf: dimension mismatch");
  std::vector<std::uint32_t> idx;
  std::vector<double> vals;
  counts.for_each_nonzero([&](std::size_t i, double v) {
    idx.push_back(static_cast<std::uint32_t>(i));
    vals.push_back(v * weights[i]);
  });
  return FeatureVector::sparse(counts.dimension(), std::move(idx), std::move(vals));
}

}  // namespace bookml

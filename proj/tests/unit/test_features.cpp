#include "doctest.h"

#include <cmath>
#include <set>

#include "bookml/error.hpp"
#include "bookml/features.hpp"
#include "test_support.hpp"

using namespace bookml;

TEST_CASE("tokenize lowercases and splits on whitespace") {
  CHECK(tokenize("Great  Book!") == Tokens{"great", "book!"});
  CHECK(tokenize("").empty());
  CHECK(tokenize(std::nullopt).empty());
  CHECK(tokenize(" \tA\nb ") == Tokens{"a", "b"});
}

TEST_CASE("stop words are filtered in order") {
  const StopList s{"the", "a"};
  CHECK(remove_stopwords({"the", "great", "book"}, s) == Tokens{"great", "book"});
  CHECK(remove_stopwords({}, s).empty());
  CHECK(remove_stopwords({"the", "the"}, s).empty());
}

TEST_CASE("default stop list has 181 unique lowercase words") {
  const auto& words = default_stopwords();
  CHECK(words.size() == 181);
  CHECK(std::set<std::string>(words.begin(), words.end()).size() == 181);
  for (const auto& w : words) CHECK(tokenize(w) == Tokens{w});
  CHECK(default_stoplist().count("the") == 1);
}

TEST_CASE("tokenize then remove stop words is idempotent") {
  Rng rng(5);
  const auto stop = default_stoplist();
  const std::vector<std::string> pool = {"The", "book", "IS", "a", "gem", "and", "not", "dull", "it", "x!"};
  for (int i = 0; i < 200; ++i) {
    std::string text;
    for (auto n = uniform_index(rng, 12); n > 0; --n) text += pool[uniform_index(rng, pool.size())] + " ";
    const auto once = remove_stopwords(tokenize(text), stop);
    std::string joined;
    for (const auto& t : once) joined += t + " ";
    CHECK(remove_stopwords(tokenize(joined), stop) == once);
  }
}

TEST_CASE("count vectorizer ranks by term frequency with lexicographic ties") {
  const std::vector<Tokens> docs = {{"a", "b", "a"}, {"b", "c"}};
  const auto v = fit_count_vectorizer(docs, 10, 1);
  CHECK(v.terms() == std::vector<std::string>{"a", "b", "c"});
  CHECK(v.doc_freq() == std::vector<std::size_t>{1, 2, 1});
  CHECK(v.corpus_size() == 2);
  CHECK(fit_count_vectorizer(docs, 10, 2).terms() == std::vector<std::string>{"b"});
  CHECK(fit_count_vectorizer(docs, 1, 1).terms() == std::vector<std::string>{"a"});
  CHECK_THROWS_AS(fit_count_vectorizer({}, 10, 1), Error);
}

TEST_CASE("vocabulary validates its invariants") {
  CHECK_THROWS_AS(Vocabulary({"a", "a"}, {1, 1}, 2), Error);
  CHECK_THROWS_AS(Vocabulary({"a"}, {0}, 2), Error);
  CHECK_THROWS_AS(Vocabulary({"a"}, {3}, 2), Error);
  CHECK(Vocabulary({"a", "b"}, {1, 2}, 2).index_of("b") == 1u);
}

TEST_CASE("count transform over vocabulary order") {
  const Vocabulary v({"a", "b", "c"}, {1, 2, 1}, 2);
  const auto x = transform_counts(v, {"a", "b", "a"});
  CHECK(x == FeatureVector::sparse(3, {0, 1}, {2.0, 1.0}));
  CHECK(transform_counts(v, {}) == FeatureVector::sparse(3, {}, {}));
  CHECK(transform_counts(v, {"z"}).stored() == 0);
}

TEST_CASE("idf weights follow ln((N+1)/(df+1))") {
  const std::vector<std::size_t> df2 = {2};
  CHECK(idf_weights(df2, 2)[0] == 0.0);
  const std::vector<std::size_t> df1 = {1};
  CHECK(idf_weights(df1, 2)[0] == doctest::Approx(0.405465).epsilon(1e-6));
  CHECK(idf_weights(df1, 1)[0] == 0.0);

  Rng rng(9);
  for (int i = 0; i < 500; ++i) {
    const auto n = 1 + uniform_index(rng, 1000);
    const std::vector<std::size_t> df = {1 + uniform_index(rng, n)};
    const double w = idf_weights(df, n)[0];
    CHECK(w >= 0.0);
    CHECK((w == 0.0) == (df[0] == n));
    CHECK(w == doctest::Approx(std::log((double(n) + 1.0) / (double(df[0]) + 1.0))));
  }
}

TEST_CASE("tf-idf scales counts and drops zero products") {
  const std::vector<double> w = {std::log(1.5), 0.0};
  const auto x = transform_tfidf(FeatureVector::sparse(2, {0}, {2.0}), w);
  CHECK(x[0] == doctest::Approx(0.81093).epsilon(1e-5));
  CHECK(transform_tfidf(FeatureVector::sparse(2, {}, {}), w).stored() == 0);
  CHECK(transform_tfidf(FeatureVector::sparse(2, {1}, {3.0}), w).stored() == 0);
  const std::vector<double> wrong = {1.0};
  CHECK_THROWS_AS(transform_tfidf(FeatureVector::sparse(2, {0}, {1.0}), wrong), Error);
}

TEST_CASE("min-max fit and transform") {
  const auto col = [](std::vector<double> v, std::vector<std::uint8_t> nulls = {}) {
    return Table(Schema({{"x", DType::Float64}}), {Column(std::move(v), std::move(nulls))});
  };
  CHECK(fit_minmax(col({2, 4, 6}), "x") == MinMaxState{2, 6});
  CHECK(fit_minmax(col({5}), "x") == MinMaxState{5, 5});
  CHECK(fit_minmax(col({-1, 3, 0}, {0, 0, 1}), "x") == MinMaxState{-1, 3});
  CHECK_THROWS_AS(fit_minmax(col({0}, {1}), "x"), Error);

  CHECK(transform_minmax({2, 6}, 4) == 0.5);
  CHECK(transform_minmax({5, 5}, 5) == 0.5);
  CHECK(transform_minmax({2, 6}, 8) == 1.5);

  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const double a = uniform01(rng) * 10 - 5;
    const MinMaxState s{a, a + uniform01(rng) * 10};
    const double x = s.min + uniform01(rng) * (s.max - s.min);
    const double y = x + uniform01(rng);
    CHECK(transform_minmax(s, x) >= 0.0);
    CHECK(transform_minmax(s, x) <= 1.0);
    CHECK(transform_minmax(s, x) <= transform_minmax(s, y));
  }
}

TEST_CASE("binary labels split 1-3 from 4-5") {
  const int expected[] = {0, 0, 0, 1, 1};
  for (int s = 1; s <= 5; ++s) CHECK(binarize_label(s) == expected[s - 1]);
  CHECK_THROWS_AS(binarize_label(0), Error);
  CHECK_THROWS_AS(binarize_label(6), Error);
}

TEST_CASE("assemble concatenates parts and records blocks") {
  const std::vector<FeaturePart> parts = {0.5, FeatureVector::sparse(3, {1}, {2.0})};
  const auto x = assemble(parts);
  CHECK(x == FeatureVector::sparse(4, {0, 2}, {0.5, 2.0}));

  const std::vector<FeaturePart> one = {FeatureVector::sparse(3, {2}, {1.0})};
  CHECK(assemble(one) == FeatureVector::sparse(3, {2}, {1.0}));

  const std::vector<FeaturePart> empty = {FeatureVector::sparse(2, {}, {}), FeatureVector::sparse(3, {}, {})};
  CHECK(assemble(empty) == FeatureVector::sparse(5, {}, {}));

  const std::vector<std::string> names = {"p", "q"};
  const auto blocks = make_block_map(names, parts);
  CHECK(blocks == BlockMap{{"p", 0, 1}, {"q", 1, 3}});
}

TEST_CASE("slicing by the block map recovers every part") {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<FeaturePart> parts;
    std::vector<std::string> names;
    for (auto n = 1 + uniform_index(rng, 5); n > 0; --n) {
      if (uniform01(rng) < 0.3) {
        parts.emplace_back(uniform01(rng));
      } else {
        parts.emplace_back(testing::random_sparse(rng, 1 + uniform_index(rng, 20), 0.3));
      }
      names.push_back("b" + std::to_string(names.size()));
    }
    const auto x = assemble(parts);
    const auto blocks = make_block_map(names, parts);
    for (std::size_t b = 0; b < parts.size(); ++b) {
      const auto slice = slice_block(x, blocks[b]);
      if (const auto* v = std::get_if<FeatureVector>(&parts[b])) {
        CHECK(slice.to_dense() == v->to_dense());
      } else {
        CHECK(slice[0] == std::get<double>(parts[b]));
      }
    }
  }
}

TEST_CASE("feature vectors enforce sparse invariants") {
  CHECK_THROWS_AS(FeatureVector::sparse(3, {1, 1}, {1.0, 2.0}), Error);
  CHECK_THROWS_AS(FeatureVector::sparse(3, {2, 1}, {1.0, 2.0}), Error);
  CHECK_THROWS_AS(FeatureVector::sparse(3, {3}, {1.0}), Error);
  CHECK(FeatureVector::sparse(3, {0, 2}, {0.0, 2.0}).stored() == 1);
}

#include "bookml/app/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_set>

#include "bookml/error.hpp"
#include "bookml/rng.hpp"
#include "bookml/table_ops.hpp"

namespace bookml::app {

Schema ratings_schema() {
  return Schema({
      {"id", DType::Text, true, {"Id"}},
      {"title", DType::Text, true, {"Title"}},
      {"price", DType::Text, true, {"Price"}},
      {"user_id", DType::Text, true, {"User_id"}},
      {"profile_name", DType::Text, true, {"profileName"}},
      {"r_helpfulness", DType::Text, true, {"review/helpfulness"}},
      {"r_score", DType::Int64, true, {"review/score"}},
      {"r_time", DType::Int64, true, {"review/time"}},
      {"r_summary", DType::Text, true, {"review/summary"}},
      {"r_review", DType::Text, true, {"review/text"}},
  });
}

Schema books_schema() {
  return Schema({
      {"title", DType::Text, true, {"Title"}},
      {"description", DType::Text, true, {}},
      {"authors", DType::Text, true, {}},
      {"image", DType::Text, true, {}},
      {"preview", DType::Text, true, {"previewLink"}},
      {"publisher", DType::Text, true, {}},
      {"publish_date", DType::Text, true, {"publishedDate"}},
      {"info_link", DType::Text, true, {"infoLink"}},
      {"categories", DType::Text, true, {}},
      {"ratings_count", DType::Int64, true, {"ratingsCount"}},
  });
}

std::optional<double> parse_price(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, std::chars_format::fixed);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v) || v < 0.0) return std::nullopt;
  return v;
}

namespace {

Table dedupe_by_title(const Table& books, std::size_t& dropped) {
  const auto& titles = books.column("title");
  std::unordered_set<std::string_view> seen;
  std::vector<std::size_t> keep;
  for (std::size_t r = 0; r < books.row_count(); ++r) {
    if (titles.is_null(r)) continue;
    if (seen.insert(titles.values<std::string>()[r]).second) {
      keep.push_back(r);
    } else {
      ++dropped;
    }
  }
  return books.take(keep);
}

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; });
}

}  // namespace

Prepared prepare_tables(const Table& ratings, const Table& books, std::optional<std::size_t> sample_rows,
                        std::uint64_t seed) {
  PrepareSummary s;
  s.rows_in = ratings.row_count();
  const Table unique_books = dedupe_by_title(books, s.duplicate_titles);
  const Table joined = join_inner(ratings, unique_books, "title", "title").table;
  s.no_book_match = s.rows_in - joined.row_count();

  const auto& price = joined.column("price");
  const auto& score = joined.column("r_score");
  const auto& summary = joined.column("r_summary");
  const auto& time = joined.column("r_time");
  std::vector<std::size_t> keep;
  std::vector<double> prices;
  for (std::size_t r = 0; r < joined.row_count(); ++r) {
    const auto p = price.is_null(r) ? std::nullopt : parse_price(price.values<std::string>()[r]);
    if (!p) {
      ++s.missing_price;
      continue;
    }
    const auto sc = score.is_null(r) ? 0 : score.values<std::int64_t>()[r];
    if (sc < 1 || sc > 5) {
      ++s.invalid_score;
      continue;
    }
    if (summary.is_null(r) || blank(summary.values<std::string>()[r])) {
      ++s.missing_summary;
      continue;
    }
    if (time.is_null(r)) {
      ++s.missing_time;
      continue;
    }
    keep.push_back(r);
    prices.push_back(*p);
  }
  if (joined.row_count() == 0) throw_data("prepare: joining ratings to books on title produced zero rows");
  if (keep.empty()) throw_data("prepare: every joined row was dropped");

  if (sample_rows && *sample_rows < keep.size()) {
    std::vector<std::size_t> order(keep.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(seed, 0x5a4d));
    shuffle(order.begin(), order.end(), rng);
    order.resize(*sample_rows);
    std::sort(order.begin(), order.end());
    std::vector<std::size_t> k2;
    std::vector<double> p2;
    for (auto i : order) {
      k2.push_back(keep[i]);
      p2.push_back(prices[i]);
    }
    s.sampled_out = keep.size() - k2.size();
    keep = std::move(k2);
    prices = std::move(p2);
  }
  s.rows_kept = keep.size();

  const std::vector<std::string> columns = {"id",     "title",    "user_id", "r_score",   "r_time",
                                            "r_summary", "r_review", "authors", "categories"};
  Table out = joined.take(keep).select(columns);
  out = out.with_column(ColumnSpec{"price", DType::Float64, false, {}}, Column(std::move(prices)));
  return Prepared{std::move(out), s};
}

}  // namespace bookml::app

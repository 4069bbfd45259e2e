#include "bookml/table_ops.hpp"

#include <algorithm>
#include <unordered_map>

#include "bookml/error.hpp"
#include "bookml/rng.hpp"

namespace bookml {

JoinResult join_inner(const Table& left, const Table& right, std::string_view left_key,
                      std::string_view right_key) {
  const auto li = left.schema().index_of(left_key);
  const auto ri = right.schema().index_of(right_key);
  if (left.schema()[li].dtype != DType::Text || right.schema()[ri].dtype != DType::Text) {
    throw_data("join keys must be text columns");
  }

  std::vector<ColumnSpec> specs(left.schema().columns().begin(), left.schema().columns().end());
  std::vector<std::size_t> right_cols;
  std::vector<std::string> renamed;
  for (std::size_t c = 0; c < right.schema().size(); ++c) {
    if (c == ri) continue;
    ColumnSpec spec = right.schema()[c];
    spec.aliases.clear();
    const bool clash = std::any_of(specs.begin(), specs.end(),
                                   [&](const ColumnSpec& s) { return s.name == spec.name; });
    if (clash) {
      spec.name += "_r";
      renamed.push_back(spec.name);
    }
    specs.push_back(std::move(spec));
    right_cols.push_back(c);
  }
  Schema schema(std::move(specs));  // throws if a suffixed name still collides

  const auto& rkeys = right.column(ri);
  std::unordered_map<std::string_view, std::vector<std::size_t>> index;
  for (std::size_t r = 0; r < right.row_count(); ++r) {
    if (rkeys.is_null(r)) continue;
    index[rkeys.values<std::string>()[r]].push_back(r);
  }

  const auto& lkeys = left.column(li);
  std::vector<std::size_t> left_rows;
  std::vector<std::size_t> right_rows;
  for (std::size_t r = 0; r < left.row_count(); ++r) {
    if (lkeys.is_null(r)) continue;
    const auto it = index.find(lkeys.values<std::string>()[r]);
    if (it == index.end()) continue;
    for (auto m : it->second) {
      left_rows.push_back(r);
      right_rows.push_back(m);
    }
  }

  std::vector<Column> columns;
  for (std::size_t c = 0; c < left.column_count(); ++c) columns.push_back(left.column(c).take(left_rows));
  for (auto c : right_cols) columns.push_back(right.column(c).take(right_rows));
  return JoinResult{Table(std::move(schema), std::move(columns)), std::move(renamed)};
}

std::vector<bool> split_mask(std::size_t rows, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw_config("train fraction must lie strictly between 0 and 1");
  }
  Rng rng(seed);
  std::vector<bool> mask(rows);
  for (std::size_t r = 0; r < rows; ++r) mask[r] = uniform01(rng) < train_fraction;
  return mask;
}

std::pair<Table, Table> split_random(const Table& t, double train_fraction, std::uint64_t seed) {
  if (t.row_count() < 2) throw_data("split_random needs at least 2 rows");
  const auto mask = split_mask(t.row_count(), train_fraction, seed);
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  for (std::size_t r = 0; r < mask.size(); ++r) (mask[r] ? train : test).push_back(r);
  return {t.take(train), t.take(test)};
}

ColumnStats column_stats(const Table& t, std::string_view col) {
  const auto& column = t.column(col);
  if (!is_numeric(column.dtype())) throw_data("column '" + std::string(col) + "' is not numeric");
  ColumnStats s;
  double sum = 0.0;
  for (std::size_t r = 0; r < column.size(); ++r) {
    if (column.is_null(r)) continue;
    const double v = column.numeric(r);
    if (s.non_null_count == 0) {
      s.min = v;
      s.max = v;
    } else {
      s.min = std::min(*s.min, v);
      s.max = std::max(*s.max, v);
    }
    sum += v;
    ++s.non_null_count;
  }
  if (s.non_null_count > 0) s.mean = sum / static_cast<double>(s.non_null_count);
  return s;
}

}  // namespace bookml

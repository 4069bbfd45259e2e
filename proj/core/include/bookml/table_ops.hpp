#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bookml/table.hpp"

namespace bookml {

struct JoinResult {
  Table table;
  // Right-side columns renamed with the "_r" suffix to avoid a collision.
  std::vector<std::string> renamed;
};

// Hash join on exact equality of two text key columns. Output columns are the
// left columns followed by the right non-key columns. Null keys never match.
// Row order follows the left table; duplicate matches expand in right order.
JoinResult join_inner(const Table& left, const Table& right, std::string_view left_key,
                      std::string_view right_key);

// Seeded Bernoulli assignment of each row; row order is kept inside each side.
std::pair<Table, Table> split_random(const Table& t, double train_fraction, std::uint64_t seed);

// Row indices split_random would assign to the train side.
std::vector<bool> split_mask(std::size_t rows, double train_fraction, std::uint64_t seed);

struct ColumnStats {
  std::optional<double> min;
  std::optional<double> max;
  std::optional<double> mean;
  std::size_t non_null_count = 0;
};

ColumnStats column_stats(const Table& t, std::string_view col);

}  // namespace bookml

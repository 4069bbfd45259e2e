#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bookml/feature_vector.hpp"

namespace bookml {

// text/int64/float64 are the ingestion types. tokens and vector columns are
// produced by feature pipeline stages and are never read from CSV.
enum class DType { Text, Int64, Float64, Tokens, Vector };

std::string_view to_string(DType t);
DType dtype_from_string(std::string_view s);
bool is_numeric(DType t);

struct ColumnSpec {
  std::string name;
  DType dtype = DType::Text;
  bool nullable = true;
  // Alternative header spellings accepted by the CSV reader (case-insensitive).
  std::vector<std::string> aliases = {};

  friend bool operator==(const ColumnSpec& a, const ColumnSpec& b) {
    return a.name == b.name && a.dtype == b.dtype && a.nullable == b.nullable;
  }
};

class Schema {
 public:
  // Throws if empty or if column names repeat.
  explicit Schema(std::vector<ColumnSpec> columns);

  std::size_t size() const noexcept { return columns_.size(); }
  const ColumnSpec& operator[](std::size_t i) const { return columns_[i]; }
  std::span<const ColumnSpec> columns() const noexcept { return columns_; }

  std::optional<std::size_t> find(std::string_view name) const;
  // Throws a data error naming the missing column.
  std::size_t index_of(std::string_view name) const;

  friend bool operator==(const Schema&, const Schema&) = default;

 private:
  std::vector<ColumnSpec> columns_;
};

using Tokens = std::vector<std::string>;

// One typed column. The null mask is empty when the column has no nulls;
// otherwise it has one byte per row (1 = null). Null slots hold a default value.
class Column {
 public:
  using Storage = std::variant<std::vector<std::string>, std::vector<std::int64_t>,
                               std::vector<double>, std::vector<Tokens>,
                               std::vector<FeatureVector>>;

  Column() = default;
  Column(Storage values, std::vector<std::uint8_t> nulls = {});

  DType dtype() const noexcept;
  std::size_t size() const noexcept;
  std::size_t null_count() const noexcept;
  bool has_nulls() const noexcept { return !nulls_.empty(); }
  bool is_null(std::size_t row) const noexcept { return !nulls_.empty() && nulls_[row] != 0; }

  template <typename T>
  const std::vector<T>& values() const {
    return std::get<std::vector<T>>(storage_);
  }
  const Storage& storage() const noexcept { return storage_; }
  std::span<const std::uint8_t> null_mask() const noexcept { return nulls_; }

  // Numeric view of an int64 or float64 cell; throws on other types.
  double numeric(std::size_t row) const;

  Column take(std::span<const std::size_t> rows) const;

  friend bool operator==(const Column&, const Column&) = default;

 private:
  Storage storage_;
  std::vector<std::uint8_t> nulls_;
};

// Immutable columnar table. Columns are shared between tables derived from one
// another, so take/with_column never copy untouched columns.
class Table {
 public:
  // Validates lengths, dtypes and nullability against the schema.
  Table(Schema schema, std::vector<Column> columns);

  const Schema& schema() const noexcept { return schema_; }
  std::size_t row_count() const noexcept { return rows_; }
  std::size_t column_count() const noexcept { return columns_.size(); }

  const Column& column(std::size_t i) const { return *columns_[i]; }
  const Column& column(std::string_view name) const;

  Table take(std::span<const std::size_t> rows) const;
  // Returns a new table with one extra column. Throws if the name is taken.
  Table with_column(ColumnSpec spec, Column column) const;
  Table select(std::span<const std::string> names) const;

  friend bool operator==(const Table& a, const Table& b);

 private:
  Table(Schema schema, std::vector<std::shared_ptr<const Column>> columns, std::size_t rows);

  Schema schema_;
  std::vector<std::shared_ptr<const Column>> columns_;
  std::size_t rows_ = 0;
};

}  // namespace bookml

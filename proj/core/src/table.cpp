#include "bookml/table.hpp"

#include <algorithm>
#include <unordered_set>

#include "bookml/error.hpp"

namespace bookml {

std::string_view to_string(DType t) {
  switch (t) {
    case DType::Text: return "text";
    case DType::Int64: return "int64";
    case DType::Float64: return "float64";
    case DType::Tokens: return "tokens";
    case DType::Vector: return "vector";
  }
  return "?";
}

DType dtype_from_string(std::string_view s) {
  if (s == "text") return DType::Text;
  if (s == "int64") return DType::Int64;
  if (s == "float64") return DType::Float64;
  if (s == "tokens") return DType::Tokens;
  if (s == "vector") return DType::Vector;
  throw_data("unknown dtype '" + std::string(s) + "'");
}

bool is_numeric(DType t) { return t == DType::Int64 || t == DType::Float64; }

Schema::Schema(std::vector<ColumnSpec> columns) : columns_(std::move(columns)) {
  if (columns_.empty()) throw_data("schema must have at least one column");
  std::unordered_set<std::string> seen;
  for (const auto& c : columns_) {
    if (!seen.insert(c.name).second) throw_data("duplicate column name '" + c.name + "'");
  }
}

std::optional<std::size_t> Schema::find(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t Schema::index_of(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw_data("missing column '" + std::string(name) + "'");
}

Column::Column(Storage values, std::vector<std::uint8_t> nulls)
    : storage_(std::move(values)), nulls_(std::move(nulls)) {
  if (!nulls_.empty() && nulls_.size() != size()) throw_data("null mask length mismatch");
  if (std::none_of(nulls_.begin(), nulls_.end(), [](std::uint8_t b) { return b != 0; })) {
    nulls_.clear();
  }
}

DType Column::dtype() const noexcept {
  return static_cast<DType>(storage_.index());
}

std::size_t Column::size() const noexcept {
  return std::visit([](const auto& v) { return v.size(); }, storage_);
}

std::size_t Column::null_count() const noexcept {
  return static_cast<std::size_t>(std::count(nulls_.begin(), nulls_.end(), std::uint8_t{1}));
}

double Column::numeric(std::size_t row) const {
  if (const auto* i = std::get_if<std::vector<std::int64_t>>(&storage_)) {
    return static_cast<double>((*i)[row]);
  }
  if (const auto* d = std::get_if<std::vector<double>>(&storage_)) return (*d)[row];
  throw_data("column is not numeric");
}

Column Column::take(std::span<const std::size_t> rows) const {
  Storage out = std::visit(
      [&](const auto& v) -> Storage {
        std::remove_cvref_t<decltype(v)> picked;
        picked.reserve(rows.size());
        for (auto r : rows) picked.push_back(v.at(r));
        return picked;
      },
      storage_);
  std::vector<std::uint8_t> nulls;
  if (!nulls_.empty()) {
    nulls.reserve(rows.size());
    for (auto r : rows) nulls.push_back(nulls_[r]);
  }
  return Column(std::move(out), std::move(nulls));
}

Table::Table(Schema schema, std::vector<Column> columns) : schema_(std::move(schema)) {
  if (columns.size() != schema_.size()) throw_data("column count does not match schema");
  rows_ = columns.front().size();
  for (std::size_t i = 0; i < columns.size(); ++i) {
    const auto& spec = schema_[i];
    if (columns[i].dtype() != spec.dtype) {
      throw_data("column '" + spec.name + "' has dtype " + std::string(to_string(columns[i].dtype())) +
                 ", schema says " + std::string(to_string(spec.dtype)));
    }
    if (columns[i].size() != rows_) throw_data("column '" + spec.name + "' has wrong length");
    if (!spec.nullable && columns[i].has_nulls()) {
      throw_data("non-nullable column '" + spec.name + "' contains nulls");
    }
    columns_.push_back(std::make_shared<const Column>(std::move(columns[i])));
  }
}

Table::Table(Schema schema, std::vector<std::shared_ptr<const Column>> columns, std::size_t rows)
    : schema_(std::move(schema)), columns_(std::move(columns)), rows_(rows) {}

const Column& Table::column(std::string_view name) const {
  return *columns_[schema_.index_of(name)];
}

Table Table::take(std::span<const std::size_t> rows) const {
  std::vector<std::shared_ptr<const Column>> cols;
  cols.reserve(columns_.size());
  for (const auto& c : columns_) cols.push_back(std::make_shared<const Column>(c->take(rows)));
  return Table(schema_, std::move(cols), rows.size());
}

Table Table::with_column(ColumnSpec spec, Column column) const {
  if (schema_.find(spec.name)) throw_data("column '" + spec.name + "' already exists");
  if (column.size() != rows_) throw_data("column '" + spec.name + "' has wrong length");
  if (column.dtype() != spec.dtype) throw_data("column '" + spec.name + "' dtype mismatch");
  if (!spec.nullable && column.has_nulls()) {
    throw_data("non-nullable column '" + spec.name + "' contains nulls");
  }
  std::vector<ColumnSpec> specs(schema_.columns().begin(), schema_.columns().end());
  specs.push_back(std::move(spec));
  auto cols = columns_;
  cols.push_back(std::make_shared<const Column>(std::move(column)));
  return Table(Schema(std::move(specs)), std::move(cols), rows_);
}

Table Table::select(std::span<const std::string> names) const {
  std::vector<ColumnSpec> specs;
  std::vector<std::shared_ptr<const Column>> cols;
  for (const auto& n : names) {
    const auto i = schema_.index_of(n);
    specs.push_back(schema_[i]);
    cols.push_back(columns_[i]);
  }
  return Table(Schema(std::move(specs)), std::move(cols), rows_);
}

bool operator==(const Table& a, const Table& b) {
  if (a.rows_ != b.rows_ || !(a.schema_ == b.schema_)) return false;
  for (std::size_t i = 0; i < a.columns_.size(); ++i) {
    if (a.columns_[i] != b.columns_[i] && !(*a.columns_[i] == *b.columns_[i])) return false;
  }
  return true;
}

}  // namespace bookml

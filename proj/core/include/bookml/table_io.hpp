#pragma once

#include <filesystem>

#include "bookml/table.hpp"

namespace bookml {

// Persisted table: a directory holding schema.json plus one binary file per
// column. The layout is described in docs/table_format.md. Only text, int64
// and float64 columns can be saved.
void save_table(const Table& table, const std::filesystem::path& dir);
Table load_table(const std::filesystem::path& dir);

}  // namespace bookml

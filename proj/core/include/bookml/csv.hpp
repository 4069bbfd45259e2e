#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "bookml/table.hpp"

namespace bookml {

struct IngestOptions {
  char delimiter = ',';
  char quote = '"';
  bool has_header = true;
  // Skipped records may not exceed this share of all data records.
  double max_malformed_fraction = 0.01;
};

struct ParseResult {
  Table table;
  std::size_t records = 0;    // data records seen, malformed included
  std::size_t malformed = 0;  // records skipped
};

// RFC-4180 reader: doubled quotes escape, quoted fields may span lines, no
// backslash escapes. An empty unquoted cell is null in a nullable column; a
// quoted empty cell is the empty string. Unparsable typed cells become null
// when the column is nullable. Records with the wrong field count, an
// unterminated quote, or a bad cell in a non-nullable column are skipped and
// counted as malformed.
ParseResult parse_csv(const std::filesystem::path& path, const Schema& schema,
                      const IngestOptions& opts = {});
ParseResult parse_csv_text(std::string_view text, const Schema& schema,
                           const IngestOptions& opts = {});

// Writes text/int64/float64 columns in the dialect parse_csv reads, so
// write-then-parse reproduces the table exactly.
void write_csv(const Table& table, std::ostream& out, const IngestOptions& opts = {});

}  // namespace bookml

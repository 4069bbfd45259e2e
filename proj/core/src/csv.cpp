#include "bookml/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include "bookml/error.hpp"

namespace bookml {
namespace {

void validate(const IngestOptions& opts) {
  if (opts.delimiter == opts.quote) throw_config("csv delimiter and quote must differ");
  if (opts.delimiter == '\n' || opts.quote == '\n' || opts.delimiter == '\r') {
    throw_config("csv delimiter/quote may not be a line break");
  }
  if (!(opts.max_malformed_fraction >= 0.0 && opts.max_malformed_fraction <= 1.0)) {
    throw_config("max_malformed_fraction must lie in [0, 1]");
  }
}

struct Field {
  std::string text;
  bool quoted = false;
};

class RecordReader {
 public:
  RecordReader(std::string_view buf, const IngestOptions& opts, bool skip_blank)
      : buf_(buf), delim_(opts.delimiter), quote_(opts.quote), skip_blank_(skip_blank) {
    if (buf_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
  }

  // Reads the next non-blank record. Returns false at end of input.
  bool next(std::vector<Field>& fields, std::size_t& used, bool& malformed) {
    malformed = false;
    used = 0;
    // Blank lines are not records, except in a one-column file where they
    // encode a single empty cell.
    if (skip_blank_) {
      while (pos_ < buf_.size() && (buf_[pos_] == '\n' || buf_[pos_] == '\r')) ++pos_;
    }
    if (pos_ >= buf_.size()) return false;

    for (;;) {
      if (used == fields.size()) fields.emplace_back();
      Field& f = fields[used++];
      f.text.clear();
      f.quoted = false;
      if (pos_ < buf_.size() && buf_[pos_] == quote_) {
        f.quoted = true;
        ++pos_;
        bool closed = false;
        while (pos_ < buf_.size()) {
          const auto q = buf_.find(quote_, pos_);
          if (q == std::string_view::npos) {
            f.text.append(buf_.substr(pos_));
            pos_ = buf_.size();
            break;
          }
          f.text.append(buf_.substr(pos_, q - pos_));
          pos_ = q + 1;
          if (pos_ < buf_.size() && buf_[pos_] == quote_) {
            f.text.push_back(quote_);
            ++pos_;
            continue;
          }
          closed = true;
          break;
        }
        if (!closed) malformed = true;
        // Anything between the closing quote and the separator is junk.
        while (pos_ < buf_.size() && buf_[pos_] != delim_ && buf_[pos_] != '\n') {
          if (!(buf_[pos_] == '\r' && pos_ + 1 < buf_.size() && buf_[pos_ + 1] == '\n')) {
            malformed = true;
          }
          ++pos_;
        }
      } else {
        std::size_t end = pos_;
        while (end < buf_.size() && buf_[end] != delim_ && buf_[end] != '\n') ++end;
        std::size_t stop = end;
        if (stop > pos_ && buf_[stop - 1] == '\r' && (stop == buf_.size() || buf_[stop] == '\n')) {
          --stop;
        }
        f.text.assign(buf_.substr(pos_, stop - pos_));
        pos_ = end;
      }

      if (pos_ >= buf_.size()) return true;
      if (buf_[pos_] == delim_) {
        ++pos_;
        continue;
      }
      ++pos_;  // '\n'
      return true;
    }
  }

 private:
  std::string_view buf_;
  std::size_t pos_ = 0;
  char delim_;
  char quote_;
  bool skip_blank_;
};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool header_matches(const ColumnSpec& spec, std::string_view header) {
  const auto h = lower(header);
  if (h == lower(spec.name)) return true;
  return std::any_of(spec.aliases.begin(), spec.aliases.end(),
                     [&](const std::string& a) { return lower(a) == h; });
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

// Integers also accept an integral decimal spelling such as "5.0".
bool parse_int64(std::string_view s, std::int64_t& out) {
  if (parse_number(s, out)) return true;
  double d = 0.0;
  if (!parse_number(s, d) || !std::isfinite(d) || d != std::trunc(d) || std::fabs(d) > 9.0e15) return false;
  out = static_cast<std::int64_t>(d);
  return true;
}

// Accumulates one column; commit/rollback keeps skipped records out.
class ColumnBuilder {
 public:
  explicit ColumnBuilder(const ColumnSpec& spec) : spec_(spec) {
    switch (spec.dtype) {
      case DType::Text: values_ = std::vector<std::string>{}; break;
      case DType::Int64: values_ = std::vector<std::int64_t>{}; break;
      case DType::Float64: values_ = std::vector<double>{}; break;
      default: throw_config("column '" + spec.name + "': only text/int64/float64 can be read from CSV");
    }
  }

  // Returns false when the cell cannot be stored (bad value in a non-nullable column).
  bool push(const Field& f) {
    const bool empty_unquoted = f.text.empty() && !f.quoted;
    bool ok = true;
    bool null = false;
    switch (spec_.dtype) {
      case DType::Text: {
        auto& v = std::get<std::vector<std::string>>(values_);
        if (empty_unquoted && spec_.nullable) {
          null = true;
          v.emplace_back();
        } else {
          v.push_back(f.text);
        }
        break;
      }
      case DType::Int64: {
        auto& v = std::get<std::vector<std::int64_t>>(values_);
        std::int64_t x = 0;
        ok = parse_int64(f.text, x);
        null = !ok;
        v.push_back(ok ? x : 0);
        break;
      }
      case DType::Float64: {
        auto& v = std::get<std::vector<double>>(values_);
        double x = 0.0;
        ok = parse_number(f.text, x);
        null = !ok;
        v.push_back(ok ? x : 0.0);
        break;
      }
      default: break;
    }
    nulls_.push_back(null ? 1 : 0);
    return ok || spec_.nullable;
  }

  void rollback() {
    std::visit([](auto& v) { v.pop_back(); }, values_);
    nulls_.pop_back();
  }

  Column finish() { return Column(std::move(values_), std::move(nulls_)); }

 private:
  const ColumnSpec& spec_;
  Column::Storage values_;
  std::vector<std::uint8_t> nulls_;
};

}  // namespace

ParseResult parse_csv_text(std::string_view text, const Schema& schema, const IngestOptions& opts) {
  validate(opts);
  RecordReader reader(text, opts, schema.size() > 1);
  std::vector<Field> fields;
  std::size_t used = 0;
  bool malformed = false;

  if (opts.has_header) {
    if (!reader.next(fields, used, malformed)) throw_data("csv: missing header");
    if (used != schema.size()) {
      throw_data("csv header has " + std::to_string(used) + " columns, schema expects " +
                 std::to_string(schema.size()));
    }
    for (std::size_t i = 0; i < used; ++i) {
      if (!header_matches(schema[i], fields[i].text)) {
        throw_data("csv header column " + std::to_string(i) + " is '" + fields[i].text +
                   "', schema expects '" + schema[i].name + "'");
      }
    }
  }

  std::vector<ColumnBuilder> builders;
  builders.reserve(schema.size());
  for (const auto& spec : schema.columns()) builders.emplace_back(spec);

  std::size_t records = 0;
  std::size_t skipped = 0;

  while (reader.next(fields, used, malformed)) {
    ++records;
    if (malformed || used != schema.size()) {
      ++skipped;
      continue;
    }
    std::size_t pushed = 0;
    bool ok = true;
    for (; pushed < used; ++pushed) {
      if (!builders[pushed].push(fields[pushed])) {
        ok = false;
        ++pushed;
        break;
      }
    }
    if (!ok) {
      for (std::size_t i = 0; i < pushed; ++i) builders[i].rollback();
      ++skipped;
    }
  }

  if (records > 0) {
    const double frac = static_cast<double>(skipped) / static_cast<double>(records);
    if (frac > opts.max_malformed_fraction) {
      throw_data("csv: " + std::to_string(skipped) + " of " + std::to_string(records) +
                 " records malformed, above the allowed fraction");
    }
  }

  std::vector<Column> columns;
  columns.reserve(builders.size());
  for (auto& b : builders) columns.push_back(b.finish());
  return ParseResult{Table(schema, std::move(columns)), records, skipped};
}

ParseResult parse_csv(const std::filesystem::path& path, const Schema& schema, const IngestOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_data("file not found: " + path.string());
  std::string buf;
  in.seekg(0, std::ios::end);
  const auto size = in.tellg();
  if (size > 0) {
    buf.resize(static_cast<std::size_t>(size));
    in.seekg(0);
    in.read(buf.data(), size);
  }
  return parse_csv_text(buf, schema, opts);
}

namespace {

void write_text(std::ostream& out, const std::string& s, const IngestOptions& opts) {
  const bool needs_quote = s.empty() || s.find_first_of(std::string{opts.delimiter, opts.quote, '\n', '\r'}) !=
                                            std::string::npos;
  if (!needs_quote) {
    out << s;
    return;
  }
  out << opts.quote;
  for (char c : s) {
    if (c == opts.quote) out << opts.quote;
    out << c;
  }
  out << opts.quote;
}

}  // namespace

void write_csv(const Table& table, std::ostream& out, const IngestOptions& opts) {
  validate(opts);
  const auto& schema = table.schema();
  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (!is_numeric(schema[c].dtype) && schema[c].dtype != DType::Text) {
      throw_config("write_csv: column '" + schema[c].name + "' is not a scalar column");
    }
  }
  if (opts.has_header) {
    for (std::size_t c = 0; c < schema.size(); ++c) {
      if (c) out << opts.delimiter;
      write_text(out, schema[c].name, opts);
    }
    out << '\n';
  }
  char num[64];
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    for (std::size_t c = 0; c < schema.size(); ++c) {
      if (c) out << opts.delimiter;
      const auto& col = table.column(c);
      if (col.is_null(r)) continue;
      switch (col.dtype()) {
        case DType::Text: write_text(out, col.values<std::string>()[r], opts); break;
        case DType::Int64: {
          auto res = std::to_chars(num, num + sizeof num, col.values<std::int64_t>()[r]);
          out.write(num, res.ptr - num);
          break;
        }
        case DType::Float64: {
          auto res = std::to_chars(num, num + sizeof num, col.values<double>()[r]);
          out.write(num, res.ptr - num);
          break;
        }
        default: break;
      }
    }
    out << '\n';
  }
}

}  // namespace bookml

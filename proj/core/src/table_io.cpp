#include "bookml/table_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "bookml/error.hpp"
#include "json.hpp"

namespace bookml {
namespace {

static_assert(std::endian::native == std::endian::little, "table files are little-endian");

constexpr char kMagic[4] = {'B', 'M', 'L', 'C'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : path_(path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_data("table column file missing: " + path.string());
    buf_.assign(std::istreambuf_iterator<char>(in), {});
  }

  template <typename T>
  T get() {
    T v;
    std::memcpy(&v, take(sizeof(T)), sizeof(T));
    return v;
  }

  const char* take(std::size_t n) {
    if (n > buf_.size() - pos_) throw_data("table column file truncated: " + path_.string());
    const char* p = buf_.data() + pos_;
    pos_ += n;
    return p;
  }

  bool at_end() const { return pos_ == buf_.size(); }

 private:
  std::filesystem::path path_;
  std::string buf_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_table(const Table& table, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::json cols = nlohmann::json::array();
  for (std::size_t c = 0; c < table.column_count(); ++c) {
    const auto& spec = table.schema()[c];
    const auto& col = table.column(c);
    if (!is_numeric(spec.dtype) && spec.dtype != DType::Text) {
      throw_config("save_table: column '" + spec.name + "' has unsupported dtype");
    }
    char name[32];
    std::snprintf(name, sizeof name, "c%03zu.bin", c);
    cols.push_back({{"name", spec.name},
                    {"dtype", std::string(to_string(spec.dtype))},
                    {"nullable", spec.nullable},
                    {"file", name}});

    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw_data("cannot write " + (dir / name).string());
    out.write(kMagic, 4);
    put(out, kVersion);
    put(out, static_cast<std::uint8_t>(spec.dtype));
    put(out, static_cast<std::uint64_t>(col.size()));
    put(out, static_cast<std::uint8_t>(col.has_nulls() ? 1 : 0));
    if (col.has_nulls()) {
      out.write(reinterpret_cast<const char*>(col.null_mask().data()),
                static_cast<std::streamsize>(col.size()));
    }
    switch (spec.dtype) {
      case DType::Int64: {
        const auto& v = col.values<std::int64_t>();
        out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * 8));
        break;
      }
      case DType::Float64: {
        const auto& v = col.values<double>();
        out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * 8));
        break;
      }
      case DType::Text: {
        const auto& v = col.values<std::string>();
        std::uint64_t off = 0;
        put(out, off);
        for (const auto& s : v) {
          off += s.size();
          put(out, off);
        }
        for (const auto& s : v) out.write(s.data(), static_cast<std::streamsize>(s.size()));
        break;
      }
      default: break;
    }
    if (!out) throw_data("write failed: " + (dir / name).string());
  }

  nlohmann::json doc = {{"format", "bookml-table"},
                        {"version", kVersion},
                        {"row_count", table.row_count()},
                        {"columns", cols}};
  std::ofstream meta(dir / "schema.json", std::ios::trunc);
  meta << doc.dump(2) << '\n';
  if (!meta) throw_data("cannot write " + (dir / "schema.json").string());
}

namespace {

Table load_table_impl(const std::filesystem::path& dir) {
  std::ifstream meta(dir / "schema.json");
  if (!meta) throw_data("no table at " + dir.string());
  const auto doc = nlohmann::json::parse(meta);
  if (doc.at("format") != "bookml-table") throw_data("not a bookml table: " + dir.string());
  if (doc.at("version").get<std::uint32_t>() != kVersion) {
    throw_data("unsupported table version in " + dir.string());
  }

  const auto rows = doc.at("row_count").get<std::uint64_t>();
  std::vector<ColumnSpec> specs;
  std::vector<Column> columns;
  for (const auto& c : doc.at("columns")) {
    ColumnSpec spec{c.at("name").get<std::string>(), dtype_from_string(c.at("dtype").get<std::string>()),
                    c.at("nullable").get<bool>()};
    Reader in(dir / c.at("file").get<std::string>());
    if (std::memcmp(in.take(4), kMagic, 4) != 0) throw_data("bad column file magic in " + dir.string());
    if (in.get<std::uint32_t>() != kVersion) throw_data("unsupported column file version");
    if (in.get<std::uint8_t>() != static_cast<std::uint8_t>(spec.dtype)) {
      throw_data("column '" + spec.name + "' dtype disagrees with descriptor");
    }
    if (in.get<std::uint64_t>() != rows) throw_data("column '" + spec.name + "' row count mismatch");
    std::vector<std::uint8_t> nulls;
    if (in.get<std::uint8_t>() != 0) {
      const char* p = in.take(rows);
      nulls.assign(p, p + rows);
    }
    Column::Storage storage;
    switch (spec.dtype) {
      case DType::Int64: {
        std::vector<std::int64_t> v(rows);
        std::memcpy(v.data(), in.take(rows * 8), rows * 8);
        storage = std::move(v);
        break;
      }
      case DType::Float64: {
        std::vector<double> v(rows);
        std::memcpy(v.data(), in.take(rows * 8), rows * 8);
        storage = std::move(v);
        break;
      }
      case DType::Text: {
        std::vector<std::uint64_t> offsets(rows + 1);
        std::memcpy(offsets.data(), in.take((rows + 1) * 8), (rows + 1) * 8);
        const char* bytes = in.take(offsets.back());
        std::vector<std::string> v;
        v.reserve(rows);
        for (std::size_t r = 0; r < rows; ++r) {
          if (offsets[r + 1] < offsets[r] || offsets[r + 1] > offsets.back()) throw_data("corrupt text offsets");
          v.emplace_back(bytes + offsets[r], offsets[r + 1] - offsets[r]);
        }
        storage = std::move(v);
        break;
      }
      default: throw_data("column '" + spec.name + "' has unsupported dtype");
    }
    if (!in.at_end()) throw_data("trailing bytes in column file for '" + spec.name + "'");
    specs.push_back(std::move(spec));
    columns.emplace_back(std::move(storage), std::move(nulls));
  }
  return Table(Schema(std::move(specs)), std::move(columns));
}

}  // namespace

Table load_table(const std::filesystem::path& dir) {
  try {
    return load_table_impl(dir);
  } catch (const nlohmann::json::exception& e) {
    throw_data("corrupt table descriptor in " + dir.string() + ": " + e.what());
  }
}

}  // namespace bookml

#include "doctest.h"

#include <fstream>

#include "bookml/error.hpp"
#include "bookml/table_io.hpp"
#include "test_support.hpp"

using namespace bookml;

namespace {

Table sample() {
  Schema s({{"id", DType::Int64, false}, {"price", DType::Float64}, {"title", DType::Text}});
  return Table(s, {Column(std::vector<std::int64_t>{7, -3, 1LL << 40}),
                   Column(std::vector<double>{19.99, 0.0, -0.0}, {0, 1, 0}),
                   Column(std::vector<std::string>{"a, \"b\"", "", "line\nbreak"}, {0, 1, 0})});
}

}  // namespace

TEST_CASE("save and load reproduce the table exactly") {
  testing::TempDir dir("tableio");
  const Table t = sample();
  save_table(t, dir / "t");
  CHECK(load_table(dir / "t") == t);
  const auto loaded = load_table(dir / "t");
  CHECK(std::signbit(loaded.column("price").values<double>()[2]));
}

TEST_CASE("truncated or altered files fail with data errors") {
  testing::TempDir dir("tableio-bad");
  save_table(sample(), dir / "t");
  const auto col = dir / "t" / "c000.bin";
  const auto size = std::filesystem::file_size(col);
  std::filesystem::resize_file(col, size - 3);
  CHECK_THROWS_AS(load_table(dir / "t"), Error);

  save_table(sample(), dir / "u");
  {
    std::ofstream out(dir / "u" / "c001.bin", std::ios::app | std::ios::binary);
    out << "junk";
  }
  CHECK_THROWS_AS(load_table(dir / "u"), Error);

  save_table(sample(), dir / "v");
  {
    std::ofstream out(dir / "v" / "schema.json", std::ios::trunc);
    out << R"({"format":"bookml-table","version":99,"row_count":3,"columns":[]})";
  }
  try {
    load_table(dir / "v");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Data);
  }
  {
    std::ofstream out(dir / "v" / "schema.json", std::ios::trunc);
    out << "{not json";
  }
  CHECK_THROWS_AS(load_table(dir / "v"), Error);
  CHECK_THROWS_AS(load_table(dir / "nothing"), Error);
}

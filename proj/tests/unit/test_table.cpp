#include "doctest.h"

#include "bookml/error.hpp"
#include "bookml/table.hpp"

using namespace bookml;

namespace {

Table small() {
  Schema s({{"id", DType::Int64, false}, {"name", DType::Text, true}});
  return Table(s, {Column(std::vector<std::int64_t>{1, 2, 3}),
                   Column(std::vector<std::string>{"a", "", "c"}, {0, 1, 0})});
}

}  // namespace

TEST_CASE("schema rejects empty and repeated names") {
  CHECK_THROWS_AS(Schema({}), Error);
  CHECK_THROWS_AS(Schema({{"a", DType::Text}, {"a", DType::Int64}}), Error);
  Schema s({{"a", DType::Text}, {"b", DType::Int64}});
  CHECK(s.find("b") == 1u);
  CHECK_FALSE(s.find("c").has_value());
}

TEST_CASE("column reports nulls and numeric views") {
  const Table t = small();
  CHECK(t.row_count() == 3);
  CHECK(t.column("name").is_null(1));
  CHECK(t.column("name").null_count() == 1);
  CHECK(t.column("id").numeric(2) == 3.0);
  CHECK_THROWS_AS(t.column("name").numeric(0), Error);
  CHECK_THROWS_AS(t.column("missing"), Error);
}

TEST_CASE("table validates shape against the schema") {
  Schema s({{"id", DType::Int64, false}});
  CHECK_THROWS_AS(Table(s, {Column(std::vector<std::string>{"x"})}), Error);
  CHECK_THROWS_AS(Table(s, {Column(std::vector<std::int64_t>{1}, {1})}), Error);
  Schema two({{"a", DType::Int64}, {"b", DType::Int64}});
  CHECK_THROWS_AS(Table(two, {Column(std::vector<std::int64_t>{1}), Column(std::vector<std::int64_t>{1, 2})}), Error);
}

TEST_CASE("operations return new tables and leave inputs unchanged") {
  const Table t = small();
  const Table copy = t;
  const std::vector<std::size_t> rows = {2, 0};
  const Table taken = t.take(rows);
  CHECK(taken.row_count() == 2);
  CHECK(taken.column("id").values<std::int64_t>() == std::vector<std::int64_t>{3, 1});

  const Table wider = t.with_column({"score", DType::Float64, false}, Column(std::vector<double>{0.5, 1.5, 2.5}));
  CHECK(wider.column_count() == 3);
  CHECK_THROWS_AS(t.with_column({"id", DType::Int64}, Column(std::vector<std::int64_t>{1, 2, 3})), Error);

  const std::vector<std::string> names = {"name"};
  CHECK(t.select(names).column_count() == 1);
  CHECK(t == copy);
}

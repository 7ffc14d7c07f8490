#include <doctest.h>

#include "helpers.hpp"
#include "periop/data.hpp"

using namespace periop;
using testing::code_of;

namespace {

Schema small_schema() {
  return Schema({{"age", VariableKind::continuous()}, {"ifsmoke", VariableKind::binary()}}, {"seriouscomp"});
}

}  // namespace

TEST_CASE("csv parse of a single row") {
  const auto ds = parse_csv("age,ifsmoke,seriouscomp\n65,1,0\n", small_schema());
  CHECK(ds.n_rows() == 1);
  CHECK(ds.missing_count() == 0);
  CHECK(ds.at(0, 0).number() == 65.0);
  CHECK(ds.at(0, 1).level() == 1);
  CHECK(ds.outcome("seriouscomp")[0] == 0);
}

TEST_CASE("NA predictor is missing, NA outcome is an error") {
  const auto ds = parse_csv("age,ifsmoke,seriouscomp\nNA,1,0\n", small_schema());
  CHECK(ds.at(0, 0).is_missing());
  CHECK(code_of([] { parse_csv("age,ifsmoke,seriouscomp\n65,1,NA\n", small_schema()); }) ==
        ErrorCode::MissingOutcome);
}

TEST_CASE("csv header may permute columns and round-trips") {
  const auto a = parse_csv("seriouscomp,ifsmoke,age\n1,0,70.25\n0,,\n", small_schema());
  CHECK(a.at(0, 0).number() == 70.25);
  CHECK(a.at(1, 1).is_missing());
  const auto b = parse_csv(to_csv(a), small_schema());
  CHECK(a == b);
}

TEST_CASE("csv errors") {
  CHECK(code_of([] { parse_csv("age,seriouscomp\n1,0\n", small_schema()); }) == ErrorCode::MissingColumn);
  CHECK(code_of([] { parse_csv("age,ifsmoke,seriouscomp\nabc,1,0\n", small_schema()); }) ==
        ErrorCode::UnparseableCell);
  CHECK(code_of([] { parse_csv("age,ifsmoke,seriouscomp,extra\n1,1,0,2\n", small_schema()); }) ==
        ErrorCode::UnknownColumn);
}

TEST_CASE("format_number round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.125, -2.5})
    CHECK(std::stod(format_number(v)) == v);
}

TEST_CASE("index split keeps order") {
  Dataset ds(small_schema(), 10);
  for (std::size_t r = 0; r < 10; ++r) ds.set(r, 0, Cell::number(static_cast<double>(r)));
  const auto p = temporal_split(ds, IndexSplit{{0, 1, 2, 3, 4}});
  REQUIRE(p.train.n_rows() == 5);
  REQUIRE(p.test.n_rows() == 5);
  for (std::size_t r = 0; r < 5; ++r) {
    CHECK(p.train.at(r, 0).number() == static_cast<double>(r));
    CHECK(p.test.at(r, 0).number() == static_cast<double>(r + 5));
  }
  std::vector<std::size_t> all(10);
  for (std::size_t i = 0; i < 10; ++i) all[i] = i;
  CHECK(code_of([&] { temporal_split(ds, IndexSplit{all}); }) == ErrorCode::EmptyPartition);
}

TEST_CASE("threshold split on a year column gives 580 / 187") {
  Schema s({{"age", VariableKind::continuous()}}, {"y"}, {"year"});
  Dataset ds(s, 767);
  for (std::size_t r = 0; r < 767; ++r) {
    ds.set(r, 0, Cell::number(50));
    ds.set_metadata(r, 0, r < 580 ? 2020.0 + static_cast<double>(r % 3) : 2023.0);
  }
  const auto p = temporal_split(ds, ThresholdSplit{"year", 2023});
  CHECK(p.train.n_rows() == 580);
  CHECK(p.test.n_rows() == 187);
}

TEST_CASE("class counts") {
  Dataset ds(small_schema(), 7);
  const auto c = class_counts(ds, "seriouscomp");
  CHECK(c.n0 == 7);
  CHECK(c.n1 == 0);
  CHECK(code_of([&] { class_counts(ds, "nope"); }) == ErrorCode::UnknownOutcome);
}

TEST_CASE("schema rejects duplicates") {
  CHECK(code_of([] { Schema({{"a", VariableKind::continuous()}, {"a", VariableKind::binary()}}, {"y"}); }) ==
        ErrorCode::InvalidSchema);
  CHECK(code_of([] { Schema({{"a", VariableKind::continuous()}}, {"a"}); }) == ErrorCode::InvalidSchema);
}

TEST_CASE("cell kinds are enforced") {
  Dataset ds(small_schema(), 1);
  CHECK_THROWS_AS(ds.set(0, 0, Cell::level(1)), Error);
  CHECK_THROWS_AS(ds.set(0, 1, Cell::level(2)), Error);
  CHECK_THROWS_AS(ds.set(0, 0, Cell::number(std::nan(""))), Error);
}

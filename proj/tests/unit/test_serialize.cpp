#include <doctest.h>

#include "helpers.hpp"
#include "periop/serialize.hpp"
#include "periop/synthgen.hpp"

using namespace periop;
using testing::code_of;

TEST_CASE("schema round trip") {
  const auto schema = synth::schema_of(synth::preset("eras-like"));
  CHECK(io::schema_from_json(io::to_json(schema)) == schema);
  CHECK(code_of([] { io::schema_from_json(io::parse_json(R"({"variables":[{"name":"a","kind":"weird"}]})")); }) ==
        ErrorCode::InvalidSchema);
}

TEST_CASE("cohort spec round trip") {
  for (const auto& name : synth::preset_names()) {
    const auto spec = synth::preset(name, 3);
    const auto j = io::to_json(spec);
    const auto back = io::cohort_spec_from_json(j);
    CHECK(io::to_json(back) == j);
    CHECK(to_csv(synth::generate(back).data) == to_csv(synth::generate(spec).data));
  }
}

TEST_CASE("forest round trip") {
  const auto ds = testing::logistic_data(200, 1, 0.0, {1.0, 0.5});
  rf::ForestConfig cfg;
  cfg.n_trees = 5;
  cfg.min_node_size = 5;
  const auto f = rf::fit_forest(ds, {"x1", "x2"}, "y", cfg);
  CHECK(io::forest_from_json(io::parse_json(io::dump(io::to_json(f)))) == f);
}

TEST_CASE("bad json text") {
  CHECK(code_of([] { io::parse_json("{not json"); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { io::read_json("/nonexistent/file.json"); }) == ErrorCode::IoError);
}

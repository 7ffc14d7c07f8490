#include <doctest.h>

#include <filesystem>
#include <random>

#include "helpers.hpp"
#include "periop/pipeline.hpp"

using namespace periop;
namespace pl = periop::pipeline;
using testing::code_of;

namespace {

pl::RunConfig quick(const std::string& preset, std::uint64_t seed) {
  pl::RunConfig cfg;
  cfg.preset = preset;
  cfg.seed = seed;
  cfg.forest.n_trees = 60;
  cfg.rf_wrapper.folds = 5;
  return cfg;
}

}  // namespace

TEST_CASE("half-up rounding to two decimals") {
  CHECK(pl::round2(0.785) == "0.79");
  CHECK(pl::round2(0.784) == "0.78");
  CHECK(pl::round2(0.125) == "0.13");
  CHECK(pl::round2(1.0) == "1.00");
}

TEST_CASE("config validation") {
  pl::RunConfig cfg = quick("interaction", 1);
  cfg.models.clear();
  CHECK(code_of([&] { pl::validate(cfg); }) == ErrorCode::InvalidConfig);
  pl::RunConfig none;
  CHECK(code_of([&] { pl::validate(none); }) == ErrorCode::InvalidConfig);
  pl::RunConfig two = quick("interaction", 1);
  two.input = "x.csv";
  CHECK(code_of([&] { pl::validate(two); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { pl::config_from_json(io::parse_json(R"({"preset":"eras-like","bogus":1})")); }) ==
        ErrorCode::InvalidConfig);
}

TEST_CASE("config json round trip") {
  auto cfg = quick("eras-like", 4);
  cfg.models = {pl::ModelKind::NbKde};
  cfg.selections = {pl::SelectionMode::Filter};
  cfg.outcome = "seriouscomp";
  const auto j = pl::to_json(cfg);
  const auto back = pl::config_from_json(j);
  CHECK(pl::to_json(back) == j);
}

TEST_CASE("full grid on the interaction preset") {
  const auto rep = pl::run(quick("interaction", 2));
  CHECK(rep.cells.size() == 12);
  for (const auto& c : rep.cells) {
    CHECK(c.error.empty());
    REQUIRE(c.out_of_sample);
    CHECK(c.out_of_sample->auc >= 0.0);
    CHECK(c.out_of_sample->auc <= 1.0);
  }
  const auto text = pl::render_table(rep);
  const auto a = text.find("All"), f = text.find("Filtering"), w = text.find("Wrapper");
  CHECK(a != std::string::npos);
  CHECK(f != std::string::npos);
  CHECK(w != std::string::npos);
  CHECK(a < f);
  CHECK(f < w);
  CHECK(pl::render_table(pl::report_json(rep)) == text);
}

TEST_CASE("single cell renders one data row") {
  auto cfg = quick("interaction", 3);
  cfg.models = {pl::ModelKind::Logit};
  cfg.selections = {pl::SelectionMode::All};
  const auto rep = pl::run(cfg);
  REQUIRE(rep.cells.size() == 1);
  const auto text = pl::render_table(rep);
  std::size_t rows = 0;
  for (std::size_t pos = 0; (pos = text.find("logit", pos)) != std::string::npos; ++pos) ++rows;
  CHECK(rows == 1);
}

TEST_CASE("report json is deterministic") {
  auto cfg = quick("interaction", 5);
  cfg.selections = {pl::SelectionMode::All, pl::SelectionMode::Filter};
  const auto a = io::dump(pl::report_json(pl::run(cfg)));
  cfg.workers = 1;
  const auto b = io::dump(pl::report_json(pl::run(cfg)));
  CHECK(a == b);
}

TEST_CASE("test rows never reach selection") {
  auto cfg = quick("eras-like", 6);
  cfg.selections = {pl::SelectionMode::Filter, pl::SelectionMode::Wrapper};
  cfg.models = {pl::ModelKind::Logit, pl::ModelKind::NbKde};
  const auto p = pl::prepare(cfg);
  const auto sel = pl::select_variables(cfg, p);

  // scramble every test-row predictor within its column
  auto full = p.full;
  std::mt19937_64 rng(1);
  std::vector<std::size_t> rows = p.split.test_rows;
  for (std::size_t v = 0; v < full.n_vars(); ++v) {
    auto shuffled = rows;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    std::vector<Cell> cells;
    for (auto r : shuffled) cells.push_back(p.full.at(r, v));
    for (std::size_t i = 0; i < rows.size(); ++i) full.set(rows[i], v, cells[i]);
  }
  auto alt = cfg;
  alt.preset.clear();
  alt.preprocess = "eras-mst";
  alt.data = full;
  const auto p2 = pl::prepare(alt);
  const auto sel2 = pl::select_variables(alt, p2);
  REQUIRE(sel.records.size() == sel2.records.size());
  for (std::size_t i = 0; i < sel.records.size(); ++i) {
    CHECK(sel.records[i].variables == sel2.records[i].variables);
    CHECK(sel.records[i].csv == sel2.records[i].csv);
  }
}

TEST_CASE("full-cohort imputation mode") {
  auto cfg = quick("eras-like", 7);
  cfg.paper_faithful = true;
  const auto p = pl::prepare(cfg);
  CHECK(p.split.train.missing_count() == 0);
  CHECK(p.split.test.missing_count() == 0);
  cfg.paper_faithful = false;
  const auto q = pl::prepare(cfg);
  CHECK(q.split.test.missing_count() == 0);
  CHECK_FALSE(p.split.test == q.split.test);
}

TEST_CASE("fitted models survive a json round trip") {
  auto cfg = quick("interaction", 8);
  const auto p = pl::prepare(cfg);
  const auto vars = p.candidates;
  for (auto kind : {pl::ModelKind::Logit, pl::ModelKind::WLogit, pl::ModelKind::NbKde, pl::ModelKind::Forest}) {
    const auto m = pl::fit_model(cfg, kind, p.split.train, p.outcome, vars);
    const auto back = pl::model_from_json(io::parse_json(io::dump(pl::model_to_json(m))), p.split.train.schema());
    const auto a = pl::predict_model(m, p.split.test);
    const auto b = pl::predict_model(back, p.split.test);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  }
}

TEST_CASE("outputs are written") {
  auto cfg = quick("interaction", 9);
  cfg.selections = {pl::SelectionMode::All};
  const auto rep = pl::run(cfg);
  const auto dir = std::filesystem::temp_directory_path() / "periop_unit_out";
  std::filesystem::remove_all(dir);
  pl::write_outputs(rep, dir);
  CHECK(std::filesystem::exists(dir / "report.json"));
  CHECK(std::filesystem::exists(dir / "report.txt"));
  CHECK(std::filesystem::exists(dir / "metrics.csv"));
  CHECK(pl::render_table(io::read_json(dir / "report.json")) == io::read_text(dir / "report.txt"));
  std::filesystem::remove_all(dir);
}

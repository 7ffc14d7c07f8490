#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "periop/forest.hpp"

using namespace periop;
using testing::code_of;

TEST_CASE("gini values") {
  CHECK(rf::gini(50, 50) == 0.5);
  CHECK(rf::gini(10, 0) == 0.0);
  CHECK(rf::gini(90, 10) == doctest::Approx(0.18));
  CHECK(code_of([] { rf::gini(0, 0); }) == ErrorCode::EmptyNode);
}

namespace {

std::vector<std::size_t> iota(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

}  // namespace

TEST_CASE("pure split of a balanced node") {
  rf::FeatureView fv{{std::vector<double>(100)}, {0}};
  std::vector<std::uint8_t> y(100);
  for (std::size_t i = 0; i < 100; ++i) {
    fv.columns[0][i] = static_cast<double>(i);
    y[i] = i >= 50;
  }
  const std::vector<std::size_t> cand{0};
  const auto s = rf::best_split(fv, y, iota(100), cand);
  REQUIRE(s);
  CHECK(s->delta_gini == doctest::Approx(0.5));
  CHECK(s->rule.threshold == 49.5);
}

TEST_CASE("constant feature has no split") {
  rf::FeatureView fv{{std::vector<double>(6, 2.0)}, {0}};
  std::vector<std::uint8_t> y{0, 1, 0, 1, 1, 0};
  const std::vector<std::size_t> cand{0};
  CHECK_FALSE(rf::best_split(fv, y, iota(6), cand));
}

TEST_CASE("six-row node matches all midpoint splits") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 100; ++t) {
    rf::FeatureView fv{{std::vector<double>(6)}, {0}};
    std::vector<std::uint8_t> y(6);
    for (std::size_t i = 0; i < 6; ++i) {
      fv.columns[0][i] = static_cast<double>(rng() % 4);
      y[i] = rng() % 2;
    }
    std::vector<double> vals = fv.columns[0];
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    double best = 0;
    for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
      const double thr = (vals[k] + vals[k + 1]) / 2;
      std::size_t l0 = 0, l1 = 0, r0 = 0, r1 = 0;
      for (std::size_t i = 0; i < 6; ++i) (fv.columns[0][i] < thr ? (y[i] ? l1 : l0) : (y[i] ? r1 : r0))++;
      const double n = 6, nl = static_cast<double>(l0 + l1), nr = static_cast<double>(r0 + r1);
      best = std::max(best, rf::gini(l0 + r0, l1 + r1) - nl / n * rf::gini(l0, l1) - nr / n * rf::gini(r0, r1));
    }
    const std::vector<std::size_t> cand{0};
    const auto s = rf::best_split(fv, y, iota(6), cand);
    if (best > 1e-12) {
      REQUIRE(s);
      CHECK(s->delta_gini == doctest::Approx(best).epsilon(1e-12));
    } else {
      CHECK_FALSE(s);
    }
  }
}

TEST_CASE("factor subset split") {
  // levels 0 and 2 are class 1, level 1 class 0
  rf::FeatureView fv{{{0, 1, 2, 0, 1, 2}}, {3}};
  std::vector<std::uint8_t> y{1, 0, 1, 1, 0, 1};
  const std::vector<std::size_t> cand{0};
  const auto s = rf::best_split(fv, y, iota(6), cand);
  REQUIRE(s);
  CHECK_FALSE(s->rule.numeric);
  CHECK(s->delta_gini == doctest::Approx(rf::gini(2, 4)));
  CHECK(s->rule.goes_left(0) == s->rule.goes_left(2));
  CHECK(s->rule.goes_left(0) != s->rule.goes_left(1));
}

namespace {

Dataset imbalanced(std::size_t n, std::uint64_t seed) {
  auto ds = testing::logistic_data(n, seed, -2.2, {1.5, 0, 0, 0, 0, 0});
  return ds;
}

const std::vector<std::string> kVars{"x1", "x2", "x3", "x4", "x5", "x6"};

}  // namespace

TEST_CASE("stratified bootstrap draws the minority count per class") {
  const auto ds = imbalanced(580, 1);
  const auto c = class_counts(ds, "y");
  rf::ForestConfig cfg;
  cfg.n_trees = 20;
  cfg.seed = 3;
  const auto f = rf::fit_forest(ds, kVars, "y", cfg);
  for (const auto& t : f.trees) {
    CHECK(t.sample_n0 == std::min(c.n0, c.n1));
    CHECK(t.sample_n1 == std::min(c.n0, c.n1));
  }
}

TEST_CASE("one tree with a huge node size is a single leaf") {
  const auto ds = imbalanced(200, 2);
  rf::ForestConfig cfg;
  cfg.n_trees = 1;
  cfg.min_node_size = 200;
  cfg.stratified = false;
  cfg.aggregation = rf::Aggregation::MeanLeaf;
  const auto f = rf::fit_forest(ds, kVars, "y", cfg);
  REQUIRE(f.trees[0].nodes.size() == 1);
  const auto& t = f.trees[0];
  const double share = static_cast<double>(t.sample_n1) / static_cast<double>(t.sample_n0 + t.sample_n1);
  for (double p : rf::predict_forest(f, ds)) CHECK(p == doctest::Approx(share));
}

TEST_CASE("same seed gives identical forests regardless of workers") {
  const auto ds = imbalanced(400, 5);
  rf::ForestConfig cfg;
  cfg.n_trees = 30;
  cfg.seed = 11;
  cfg.workers = 1;
  const auto a = rf::fit_forest(ds, kVars, "y", cfg);
  cfg.workers = 4;
  const auto b = rf::fit_forest(ds, kVars, "y", cfg);
  CHECK(a == b);
  cfg.seed = 12;
  CHECK_FALSE(a == rf::fit_forest(ds, kVars, "y", cfg));
}

namespace {

rf::Tree stump(double thr, bool left_is_one) {
  rf::Tree t;
  rf::TreeNode root;
  root.variable = 0;
  root.rule = rf::SplitRule{true, thr, 0};
  root.left = 1;
  root.right = 2;
  root.n0 = root.n1 = 10;
  root.delta_gini = 0.25;
  rf::TreeNode l, r;
  l.n1 = left_is_one ? 10 : 0;
  l.n0 = left_is_one ? 0 : 10;
  r.n1 = 10 - l.n1;
  r.n0 = 10 - l.n0;
  t.nodes = {root, l, r};
  return t;
}

}  // namespace

TEST_CASE("vote share of toy stumps") {
  rf::Forest f;
  f.variables = {"x"};
  f.cardinality = {0};
  const double thr[] = {1.0, 2.0, 3.0, 4.0, 5.0};
  for (double t : thr) f.trees.push_back(stump(t, true));
  // x = 2.5: stumps at 3, 4, 5 send it left (vote 1), stumps at 1, 2 right (vote 0)
  const double x = 2.5;
  CHECK(rf::predict_row(f, std::span<const double>(&x, 1)) == doctest::Approx(3.0 / 5.0));
  f.trees.resize(3);
  f.trees[0] = stump(10.0, true);
  f.trees[1] = stump(0.0, true);
  f.trees[2] = stump(0.0, true);
  CHECK(rf::predict_row(f, std::span<const double>(&x, 1)) == doctest::Approx(1.0 / 3.0));
  for (auto& t : f.trees) t = stump(10.0, true);
  CHECK(rf::predict_row(f, std::span<const double>(&x, 1)) == 1.0);
}

TEST_CASE("importance of stumps and unused variables") {
  rf::Forest f;
  f.variables = {"x", "unused"};
  f.cardinality = {0, 0};
  f.trees = {stump(1.0, true)};
  const auto imp = rf::importance(f);
  CHECK(imp[0].mean_decrease_gini == doctest::Approx(0.25));
  CHECK(imp[1].mean_decrease_gini == 0.0);
}

TEST_CASE("informative variable ranks first") {
  const auto ds = testing::logistic_data(800, 9, 0.0, {2.0, 0, 0, 0, 0, 0});
  rf::ForestConfig cfg;
  cfg.n_trees = 100;
  cfg.min_node_size = 10;
  const auto ranked = rf::ranked_importance(rf::fit_forest(ds, kVars, "y", cfg));
  CHECK(ranked[0].variable == "x1");
}

TEST_CASE("stratified folds") {
  std::vector<std::uint8_t> y(103, 0);
  for (std::size_t i = 0; i < 23; ++i) y[i * 4] = 1;
  const auto f = rf::stratified_folds(y, 10, 2);
  std::vector<std::size_t> ones(10, 0), all(10, 0);
  for (std::size_t i = 0; i < y.size(); ++i) {
    REQUIRE(f[i] < 10);
    all[f[i]]++;
    ones[f[i]] += y[i];
  }
  for (std::size_t k = 0; k < 10; ++k) {
    CHECK(ones[k] >= 2);
    CHECK(ones[k] <= 3);
    CHECK(all[k] >= 10);
    CHECK(all[k] <= 11);
  }
}

TEST_CASE("rf wrapper") {
  const auto five = testing::logistic_data(400, 6, 0.0, {1.2, -1.2, 1.2, -1.2, 1.2});
  rf::ForestConfig cfg;
  cfg.n_trees = 50;
  cfg.min_node_size = 10;
  const auto all = rf::rf_wrapper_select(five, "y", {"x1", "x2", "x3", "x4", "x5"}, cfg, {{5}, 5, 0.5});
  CHECK(all.variables.size() == 5);
  CHECK(all.trace.size() == 1);

  const auto ds = testing::logistic_data(1000, 7, 0.0, {1.5, -1.5, 1.5, -1.5, 1.5, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0});
  std::vector<std::string> vars;
  for (int j = 1; j <= 15; ++j) vars.push_back("x" + std::to_string(j));
  const auto r = rf::rf_wrapper_select(ds, "y", vars, cfg, {{5, 10, 15}, 5, 0.5});
  CHECK(r.trace.size() == 3);
  CHECK(r.variables.size() == 5);
  for (const auto& s : r.trace) CHECK(s.fold_accuracy.size() == 5);
}

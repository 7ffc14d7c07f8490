#include "periop/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

#include "periop/stats.hpp"

namespace periop::rf {

namespace {

constexpr double kTieEps = 1e-12;
constexpr std::size_t kMaxFactorLevels = 16;

std::size_t resolve_workers(std::size_t requested) {
  if (requested) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

bool SplitRule::goes_left(double x) const {
  if (numeric) return x < threshold;
  const auto level = static_cast<std::size_t>(x);
  return level < 64 && ((mask >> level) & 1u);
}

const TreeNode& Tree::leaf_for(std::span<const double> x) const {
  std::size_t at = 0;
  while (!nodes[at].is_leaf()) {
    const TreeNode& node = nodes[at];
    at = static_cast<std::size_t>(node.rule.goes_left(x[static_cast<std::size_t>(node.variable)])
                                      ? node.left
                                      : node.right);
  }
  return nodes[at];
}

double gini(std::size_t n0, std::size_t n1) {
  if (n0 + n1 == 0) fail(ErrorCode::EmptyNode, "Gini index of an empty node");
  const double n = static_cast<double>(n0 + n1);
  const double p0 = static_cast<double>(n0) / n;
  const double p1 = static_cast<double>(n1) / n;
  return 1.0 - p0 * p0 - p1 * p1;
}

namespace {

double split_gain(double parent, std::size_t l0, std::size_t l1, std::size_t r0, std::size_t r1) {
  const double nl = static_cast<double>(l0 + l1);
  const double nr = static_cast<double>(r0 + r1);
  const double n = nl + nr;
  return parent - (nl / n) * gini(l0, l1) - (nr / n) * gini(r0, r1);
}

struct Best {
  std::optional<Split> split;
  void offer(std::size_t var, const SplitRule& rule, double delta) {
    if (!split || delta > split->delta_gini + kTieEps) split = Split{var, rule, delta};
  }
};

void scan_numeric(const std::vector<double>& col, std::span<const std::uint8_t> y,
                  std::span<const std::size_t> rows, std::size_t var, double parent,
                  std::size_t n0, std::size_t n1, Best& best) {
  thread_local std::vector<std::pair<double, std::uint8_t>> sorted;
  sorted.clear();
  for (std::size_t r : rows) sorted.emplace_back(col[r], y[r]);
  std::sort(sorted.begin(), sorted.end());
  std::size_t l0 = 0, l1 = 0;
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    (sorted[i].second ? l1 : l0)++;
    const double a = sorted[i].first, b = sorted[i + 1].first;
    if (!(a < b)) continue;
    double mid = a + (b - a) / 2.0;
    if (!(mid > a)) mid = b;
    best.offer(var, SplitRule{true, mid, 0}, split_gain(parent, l0, l1, n0 - l0, n1 - l1));
  }
}

void scan_factor(const std::vector<double>& col, std::size_t levels, std::span<const std::uint8_t> y,
                 std::span<const std::size_t> rows, std::size_t var, double parent, std::size_t n0,
                 std::size_t n1, Best& best) {
  std::vector<std::size_t> c0(levels, 0), c1(levels, 0);
  for (std::size_t r : rows) {
    const auto l = static_cast<std::size_t>(col[r]);
    (y[r] ? c1 : c0)[l]++;
  }
  std::vector<std::size_t> present;
  for (std::size_t l = 0; l < levels; ++l)
    if (c0[l] + c1[l] > 0) present.push_back(l);
  const std::size_t k = present.size();
  if (k < 2) return;
  if (k > kMaxFactorLevels) fail(ErrorCode::InvalidArgument, "too many factor levels for subset splits");
  const std::uint64_t limit = std::uint64_t{1} << (k - 1);
  for (std::uint64_t m = 1; m < limit; ++m) {
    std::uint64_t mask = 0;
    std::size_t l0 = 0, l1 = 0;
    for (std::size_t i = 0; i + 1 < k; ++i)
      if ((m >> i) & 1u) {
        mask |= std::uint64_t{1} << present[i];
        l0 += c0[present[i]];
        l1 += c1[present[i]];
      }
    best.offer(var, SplitRule{false, 0.0, mask}, split_gain(parent, l0, l1, n0 - l0, n1 - l1));
  }
}

}  // namespace

std::optional<Split> best_split(const FeatureView& x, std::span<const std::uint8_t> y,
                                std::span<const std::size_t> rows,
                                std::span<const std::size_t> candidates) {
  std::size_t n0 = 0, n1 = 0;
  for (std::size_t r : rows) (y[r] ? n1 : n0)++;
  if (n0 + n1 < 2) return std::nullopt;
  const double parent = gini(n0, n1);
  std::vector<std::size_t> order(candidates.begin(), candidates.end());
  std::sort(order.begin(), order.end());
  Best best;
  for (std::size_t v : order) {
    if (x.cardinality[v] == 0) scan_numeric(x.columns[v], y, rows, v, parent, n0, n1, best);
    else scan_factor(x.columns[v], x.cardinality[v], y, rows, v, parent, n0, n1, best);
  }
  if (!best.split || !(best.split->delta_gini > kTieEps)) return std::nullopt;
  return best.split;
}

FeatureView feature_view(const Dataset& ds, const std::vector<std::string>& vars) {
  FeatureView fv;
  for (const auto& name : vars) {
    const std::size_t idx = ds.schema().require_index(name);
    if (ds.missing_count(idx) > 0)
      fail(ErrorCode::MissingValuePresent, "missing values in '" + name + "'");
    const auto& kind = ds.schema().variable(idx).kind;
    fv.columns.push_back(ds.column(idx));
    fv.cardinality.push_back(kind.is_continuous() ? 0 : kind.cardinality());
  }
  return fv;
}

namespace {

class TreeGrower {
 public:
  TreeGrower(const FeatureView& x, std::span<const std::uint8_t> y, std::size_t mtry,
             std::size_t min_node_size, std::mt19937_64& rng)
      : x_(x), y_(y), mtry_(mtry), min_node_size_(min_node_size), rng_(rng) {}

  Tree grow(std::vector<std::size_t> rows) {
    tree_ = Tree{};
    for (std::size_t r : rows) (y_[r] ? tree_.sample_n1 : tree_.sample_n0)++;
    build(std::move(rows));
    return std::move(tree_);
  }

 private:
  int build(std::vector<std::size_t> rows) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    std::size_t n0 = 0, n1 = 0;
    for (std::size_t r : rows) (y_[r] ? n1 : n0)++;
    tree_.nodes[id].n0 = n0;
    tree_.nodes[id].n1 = n1;
    if (n0 == 0 || n1 == 0 || rows.size() <= min_node_size_) return id;

    const auto split = best_split(x_, y_, rows, sample_candidates());
    if (!split) return id;

    std::vector<std::size_t> left, right;
    const auto& col = x_.columns[split->variable];
    for (std::size_t r : rows) (split->rule.goes_left(col[r]) ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();

    const int l = build(std::move(left));
    const int r = build(std::move(right));
    TreeNode& node = tree_.nodes[id];
    node.variable = static_cast<int>(split->variable);
    node.rule = split->rule;
    node.delta_gini = split->delta_gini;
    node.left = l;
    node.right = r;
    return id;
  }

  std::vector<std::size_t> sample_candidates() {
    const std::size_t d = x_.columns.size();
    std::vector<std::size_t> idx(d);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < mtry_; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, d - 1);
      std::swap(idx[i], idx[pick(rng_)]);
    }
    idx.resize(mtry_);
    return idx;
  }

  const FeatureView& x_;
  std::span<const std::uint8_t> y_;
  std::size_t mtry_;
  std::size_t min_node_size_;
  std::mt19937_64& rng_;
  Tree tree_;
};

}  // namespace

Forest fit_forest(const Dataset& ds, const std::vector<std::string>& vars, const std::string& outcome,
                  const ForestConfig& cfg) {
  if (vars.empty()) fail(ErrorCode::InvalidConfig, "forest needs at least one variable");
  if (cfg.n_trees < 1) fail(ErrorCode::InvalidConfig, "n_trees must be at least 1");
  if (cfg.min_node_size < 1) fail(ErrorCode::InvalidConfig, "min_node_size must be at least 1");
  const std::size_t d = vars.size();
  const std::size_t mtry =
      cfg.mtry ? cfg.mtry : std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(d))));
  if (mtry > d) fail(ErrorCode::InvalidConfig, "mtry exceeds the number of variables");

  const auto y = ds.outcome(outcome);
  std::vector<std::size_t> class_rows[2];
  for (std::size_t r = 0; r < y.size(); ++r) class_rows[y[r]].push_back(r);
  if (class_rows[0].empty() || class_rows[1].empty())
    fail(ErrorCode::OneClassOnly, "forest needs both classes");

  const FeatureView x = feature_view(ds, vars);
  Forest forest;
  forest.variables = vars;
  forest.cardinality = x.cardinality;
  forest.aggregation = cfg.aggregation;
  forest.mtry = mtry;
  forest.min_node_size = cfg.min_node_size;
  forest.trees.resize(cfg.n_trees);

  const std::size_t n_min = std::min(class_rows[0].size(), class_rows[1].size());
  parallel_for(cfg.n_trees, resolve_workers(cfg.workers), [&](std::size_t t) {
    std::mt19937_64 rng(cfg.seed + t);
    std::vector<std::size_t> sample;
    if (cfg.stratified) {
      for (const auto& rows : class_rows) {
        std::uniform_int_distribution<std::size_t> pick(0, rows.size() - 1);
        for (std::size_t i = 0; i < n_min; ++i) sample.push_back(rows[pick(rng)]);
      }
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, y.size() - 1);
      for (std::size_t i = 0; i < y.size(); ++i) sample.push_back(pick(rng));
    }
    TreeGrower grower(x, y, mtry, cfg.min_node_size, rng);
    forest.trees[t] = grower.grow(std::move(sample));
  });
  return forest;
}

double predict_row(const Forest& forest, std::span<const double> x) {
  double acc = 0.0;
  for (const Tree& tree : forest.trees) {
    const double p = tree.leaf_for(x).p1();
    acc += forest.aggregation == Aggregation::VoteShare ? (p >= 0.5 ? 1.0 : 0.0) : p;
  }
  return acc / static_cast<double>(forest.trees.size());
}

Probabilities predict_forest(const Forest& forest, const Dataset& ds) {
  const FeatureView x = feature_view(ds, forest.variables);
  for (std::size_t v = 0; v < x.cardinality.size(); ++v)
    if (x.cardinality[v] != forest.cardinality[v])
      fail(ErrorCode::DimensionMismatch, "variable '" + forest.variables[v] + "' changed kind");
  Probabilities out(ds.n_rows());
  std::vector<double> row(forest.variables.size());
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    for (std::size_t v = 0; v < row.size(); ++v) row[v] = x.columns[v][r];
    out[r] = predict_row(forest, row);
  }
  return out;
}

std::vector<ImportanceEntry> importance(const Forest& forest) {
  std::vector<double> total(forest.variables.size(), 0.0);
  for (const Tree& tree : forest.trees) {
    const double root = static_cast<double>(tree.nodes.front().n());
    for (const TreeNode& node : tree.nodes)
      if (!node.is_leaf())
        total[static_cast<std::size_t>(node.variable)] += static_cast<double>(node.n()) / root * node.delta_gini;
  }
  std::vector<ImportanceEntry> out;
  for (std::size_t v = 0; v < total.size(); ++v)
    out.push_back({forest.variables[v], total[v] / static_cast<double>(forest.trees.size())});
  return out;
}

std::vector<ImportanceEntry> ranked_importance(const Forest& forest) {
  auto out = importance(forest);
  std::stable_sort(out.begin(), out.end(), [](const ImportanceEntry& a, const ImportanceEntry& b) {
    return a.mean_decrease_gini > b.mean_decrease_gini;
  });
  return out;
}

std::vector<std::size_t> stratified_folds(std::span<const std::uint8_t> labels, std::size_t folds,
                                          std::uint64_t seed) {
  if (folds < 2) fail(ErrorCode::InvalidConfig, "need at least two folds");
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> fold(labels.size(), 0);
  std::size_t offset = 0;
  for (std::uint8_t cls = 0; cls < 2; ++cls) {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < labels.size(); ++r)
      if (labels[r] == cls) rows.push_back(r);
    std::shuffle(rows.begin(), rows.end(), rng);
    // Continue the round-robin across classes so fold sizes stay balanced.
    for (std::size_t i = 0; i < rows.size(); ++i) fold[rows[i]] = (offset + i) % folds;
    offset = (offset + rows.size()) % folds;
  }
  return fold;
}

RfWrapperResult rf_wrapper_select(const Dataset& ds, const std::string& outcome,
                                  const std::vector<std::string>& candidates, const ForestConfig& cfg,
                                  const RfWrapperOptions& opts) {
  std::vector<std::size_t> sizes = opts.sizes;
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  if (sizes.empty() || sizes.front() == 0) fail(ErrorCode::InvalidConfig, "subset sizes must be positive");
  if (sizes.back() > candidates.size())
    fail(ErrorCode::InvalidArgument, "subset size exceeds the number of candidates");

  RfWrapperResult result;
  result.ranking = ranked_importance(fit_forest(ds, candidates, outcome, cfg));

  const auto y = ds.outcome(outcome);
  const auto fold = stratified_folds(y, opts.folds, cfg.seed);
  std::vector<std::vector<std::size_t>> train_rows(opts.folds), test_rows(opts.folds);
  for (std::size_t r = 0; r < y.size(); ++r)
    for (std::size_t f = 0; f < opts.folds; ++f) (fold[r] == f ? test_rows : train_rows)[f].push_back(r);

  double best = -1.0;
  std::size_t best_k = sizes.front();
  for (std::size_t k : sizes) {
    std::vector<std::string> vars;
    for (std::size_t i = 0; i < k; ++i) vars.push_back(result.ranking[i].variable);
    ForestConfig sub = cfg;
    if (sub.mtry > k) sub.mtry = 0;
    SizeScore score{k, 0.0, {}};
    for (std::size_t f = 0; f < opts.folds; ++f) {
      if (test_rows[f].empty()) continue;
      const Dataset train = ds.select_rows(train_rows[f]);
      const Dataset test = ds.select_rows(test_rows[f]);
      const Forest forest = fit_forest(train, vars, outcome, sub);
      score.fold_accuracy.push_back(accuracy(test.outcome(outcome), predict_forest(forest, test), opts.threshold));
    }
    score.mean_accuracy = mean(score.fold_accuracy);
    if (score.mean_accuracy > best) {
      best = score.mean_accuracy;
      best_k = k;
    }
    result.trace.push_back(std::move(score));
  }
  for (std::size_t i = 0; i < best_k; ++i) result.variables.push_back(result.ranking[i].variable);
  return result;
}

}  // namespace periop::rf

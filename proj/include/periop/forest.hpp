#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "periop/data.hpp"
#include "periop/metrics.hpp"

namespace periop::rf {

// Numeric: x < threshold goes left. Factor: level l goes left when bit l of
// `mask` is set; levels never seen at fit time fall right.
struct SplitRule {
  bool numeric = true;
  double threshold = 0.0;
  std::uint64_t mask = 0;

  bool goes_left(double x) const;
  friend bool operator==(const SplitRule&, const SplitRule&) = default;
};

struct TreeNode {
  int variable = -1;  // position in Forest::variables; -1 marks a leaf
  SplitRule rule;
  int left = -1;
  int right = -1;
  std::size_t n0 = 0;
  std::size_t n1 = 0;
  double delta_gini = 0.0;  // split nodes only

  bool is_leaf() const noexcept { return variable < 0; }
  std::size_t n() const noexcept { return n0 + n1; }
  double p1() const noexcept { return n() ? static_cast<double>(n1) / static_cast<double>(n()) : 0.0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  std::size_t sample_n0 = 0;    // bootstrap tallies
  std::size_t sample_n1 = 0;

  const TreeNode& leaf_for(std::span<const double> x) const;
  friend bool operator==(const Tree&, const Tree&) = default;
};

enum class Aggregation { VoteShare, MeanLeaf };

struct ForestConfig {
  std::size_t n_trees = 500;
  std::size_t mtry = 0;  // 0: floor(sqrt(d))
  std::size_t min_node_size = 50;
  bool stratified = true;
  std::uint64_t seed = 0;
  std::size_t workers = 0;  // 0: hardware concurrency
  Aggregation aggregation = Aggregation::VoteShare;
};

struct Forest {
  std::vector<std::string> variables;
  std::vector<std::size_t> cardinality;  // 0 for numeric, level count for factors
  std::vector<Tree> trees;
  Aggregation aggregation = Aggregation::VoteShare;
  std::size_t mtry = 1;
  std::size_t min_node_size = 1;

  friend bool operator==(const Forest&, const Forest&) = default;
};

double gini(std::size_t n0, std::size_t n1);

// Column-major numeric view handed to the splitter. Factor cells hold the
// level index; cardinality[v] == 0 marks a numeric column.
struct FeatureView {
  std::vector<std::vector<double>> columns;
  std::vector<std::size_t> cardinality;
};

struct Split {
  std::size_t variable = 0;
  SplitRule rule;
  double delta_gini = 0.0;
};

// Largest Gini decrease over `candidates` for the node made of `rows`.
// Numeric thresholds are midpoints of consecutive distinct values; factor
// rules are subsets of the levels present in the node, with the last present
// level kept on the right. Ties (within 1e-12) go to the lowest variable, then
// the lowest threshold or mask. Returns nothing unless some split has
// delta > 1e-12 with both children non-empty.
std::optional<Split> best_split(const FeatureView& x, std::span<const std::uint8_t> y,
                                std::span<const std::size_t> rows,
                                std::span<const std::size_t> candidates);

FeatureView feature_view(const Dataset& ds, const std::vector<std::string>& vars);

Forest fit_forest(const Dataset& ds, const std::vector<std::string>& vars, const std::string& outcome,
                  const ForestConfig& cfg);

double predict_row(const Forest& forest, std::span<const double> x);
Probabilities predict_forest(const Forest& forest, const Dataset& ds);

struct ImportanceEntry {
  std::string variable;
  double mean_decrease_gini = 0.0;
};
// In variable order.
std::vector<ImportanceEntry> importance(const Forest& forest);
// Descending by importance, ties by variable order.
std::vector<ImportanceEntry> ranked_importance(const Forest& forest);

struct SizeScore {
  std::size_t k = 0;
  double mean_accuracy = 0.0;
  std::vector<double> fold_accuracy;
};

struct RfWrapperResult {
  std::vector<std::string> variables;
  std::vector<ImportanceEntry> ranking;
  std::vector<SizeScore> trace;  // one entry per subset size
};

struct RfWrapperOptions {
  std::vector<std::size_t> sizes{5, 10, 15, 20};
  std::size_t folds = 10;
  double threshold = 0.5;
};

RfWrapperResult rf_wrapper_select(const Dataset& ds, const std::string& outcome,
                                  const std::vector<std::string>& candidates, const ForestConfig& cfg,
                                  const RfWrapperOptions& opts = {});

// Seeded stratified fold labels in [0, folds).
std::vector<std::size_t> stratified_folds(std::span<const std::uint8_t> labels, std::size_t folds,
                                          std::uint64_t seed);

}  // namespace periop::rf

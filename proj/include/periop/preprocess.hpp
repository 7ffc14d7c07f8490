#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "periop/data.hpp"

namespace periop {

// Continuous value -> bin index. Bins are left-closed: value < cutpoints[0]
// is bin 0, cutpoints[i-1] <= value < cutpoints[i] is bin i.
struct BinsByCutpoints {
  std::vector<double> cutpoints;  // strictly increasing
  std::vector<std::string> labels;  // cutpoints.size() + 1 entries

  void validate() const;
  std::size_t bin_of(double value) const;
};

struct MergeLevels {
  std::map<std::string, std::string> mapping;  // old label -> new label
};

struct Binarize {
  std::vector<std::string> positive_levels;  // levels that become 1
};

struct EncodingRule {
  std::string target;
  std::variant<MergeLevels, Binarize, BinsByCutpoints> rule;
};

Dataset apply_encodings(const Dataset& ds, const std::vector<EncodingRule>& rules);

// A discrete view of a continuous column used only as an imputation
// conditioner (never written back to the dataset).
struct DerivedDiscretization {
  std::string source;
  BinsByCutpoints scheme;
};

struct Conditioner {
  std::variant<std::string, DerivedDiscretization> source;

  const std::string& column() const;
};

enum class Statistic { ConditionalMean, ConditionalMode };

struct ImputationEntry {
  std::string target;
  std::vector<Conditioner> conditioners;
  Statistic statistic = Statistic::ConditionalMean;
};

struct ImputationPlan {
  std::vector<ImputationEntry> entries;  // applied in order
};

// Per-cell statistic for one target over the conditioner grid. Keys are the
// conditioner level codes; rows with a Missing conditioner are not tabulated
// and are imputed from the marginal fallback.
struct ConditionalTable {
  std::string target;
  std::vector<Conditioner> conditioners;
  Statistic statistic = Statistic::ConditionalMean;
  std::map<std::vector<std::size_t>, double> cells;
  double marginal = 0.0;

  // Value used for a row (level index for ConditionalMode).
  double lookup(const Dataset& ds, std::size_t row) const;
};

ConditionalTable build_conditional_table(const Dataset& ds, const std::string& target,
                                         const std::vector<Conditioner>& conditioners);
ConditionalTable build_conditional_table(const Dataset& ds, const ImputationEntry& entry);

// Tables learned on one dataset, replayable on another (train -> test).
struct FittedImputer {
  std::vector<ConditionalTable> tables;
};

// Sequentially builds each table on `ds` with earlier targets already imputed.
FittedImputer fit_imputer(const Dataset& ds, const ImputationPlan& plan);
// Fills Missing target cells; observed cells are untouched.
Dataset apply_imputer(const Dataset& ds, const FittedImputer& imputer);
Dataset impute(const Dataset& ds, const ImputationPlan& plan);

// Age decades: "<20", "20-29", ..., "80-89", "90+".
BinsByCutpoints age_decades();
// "Underweight" (< 18.5), "Normal", "Overweight" (25.0 - 29.9), "Obese" (>= 30).
BinsByCutpoints bmi_categories();
// Surgery time in minutes: "Short" (< 90), "Medium" (90 - 150), "Long" (> 150).
BinsByCutpoints surgerytime_categories();

struct PreprocessPreset {
  std::vector<EncodingRule> encodings;  // for raw exports with un-merged levels
  ImputationPlan imputation;            // over the encoded 34-variable schema
};

// `eras-mst`: the conditional-table plan of the bowel-surgery cohort, in table
// order. `ifanemia` is conditioned on `ifcancer` because the original
// conditioner (final diagnosis) is not among the 34 predictors, and
// `anaesthesiatype` drops the nerve/local-anaesthesia conditioner for the same
// reason.
PreprocessPreset preprocess_preset(const std::string& name);

}  // namespace periop

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "periop/data.hpp"

namespace periop::synth {

struct BernoulliMarginal {
  double p = 0.5;
};

struct CategoricalMarginal {
  std::vector<std::string> levels;
  std::vector<double> probs;
  bool ordinal = true;
};

// Normal(mean, sd) conditioned on [lo, hi]; optionally rounded to integers.
struct TruncNormalMarginal {
  double mean = 0.0;
  double sd = 1.0;
  double lo = -1e300;
  double hi = 1e300;
  bool integer = false;
};

struct UniformMarginal {
  double lo = 0.0;
  double hi = 1.0;
};

using Marginal = std::variant<BernoulliMarginal, CategoricalMarginal, TruncNormalMarginal, UniformMarginal>;

struct VariableSpec {
  std::string name;
  Marginal marginal;
  double missing_rate = 0.0;
};

// One linear-predictor feature. Continuous and binary columns enter as
// (x - center) / scale; with `level` set, the feature is the indicator of that
// level.
struct Feature {
  std::string variable;
  std::string level;
  double center = 0.0;
  double scale = 1.0;
};

struct Effect {
  Feature feature;
  double coef = 0.0;
};

struct Interaction {
  Feature a;
  Feature b;
  double coef = 0.0;
};

struct OutcomeModel {
  std::string name;
  double intercept = 0.0;
  std::vector<Effect> effects;
  std::vector<Interaction> interactions;
  // When set, the intercept is re-solved so the mean ground-truth
  // probability of the generated rows equals this value.
  std::optional<double> target_prevalence;
};

// Adds a numeric metadata column `year`: the first `train_rows` rows spread
// evenly over first_year..last_train_year, the rest get test_year.
struct YearColumn {
  std::size_t train_rows = 0;
  double first_year = 2020;
  double last_train_year = 2022;
  double test_year = 2023;
};

struct CohortSpec {
  std::string name;
  std::size_t n_rows = 0;
  std::vector<VariableSpec> variables;
  std::vector<OutcomeModel> outcomes;
  std::optional<YearColumn> year;
  std::uint64_t seed = 0;
};

struct GeneratedCohort {
  Dataset data;
  std::vector<std::vector<double>> truth;  // [outcome][row] ground-truth P(y = 1)
  std::vector<double> intercepts;          // intercept used per outcome
};

void validate(const CohortSpec& spec);
Schema schema_of(const CohortSpec& spec);

// Predictors are drawn column by column, then outcomes, then missingness, all
// from one seeded stream.
GeneratedCohort generate(const CohortSpec& spec);

// eras-like, separable, noise-heavy, interaction, three-signal.
CohortSpec preset(const std::string& name, std::uint64_t seed = 0);
std::vector<std::string> preset_names();

// Mean of Normal(mean, sd) truncated to [lo, hi].
double truncated_normal_mean(double mean, double sd, double lo, double hi);

}  // namespace periop::synth

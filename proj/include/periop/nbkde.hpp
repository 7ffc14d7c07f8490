#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "periop/data.hpp"
#include "periop/metrics.hpp"

namespace periop::nb {

// One class-conditional marginal. Continuous: Gaussian-kernel density over the
// class's sample points with bandwidth h. Discrete: add-0.5 smoothed level
// frequencies.
struct MarginalDensity {
  bool continuous = true;
  std::vector<double> points;  // continuous
  double bandwidth = 0.0;      // continuous
  bool bandwidth_floored = false;
  std::vector<double> pmf;     // discrete

  double log_density(double x) const;
  double density(double x) const;
};

enum class PriorMode { Empirical, Equal };

struct NbModel {
  std::vector<std::string> variables;
  std::vector<std::size_t> var_indices;
  std::array<double, 2> priors{0.5, 0.5};
  std::array<std::vector<MarginalDensity>, 2> marginals;  // [class][variable]
};

// Silverman's rule 0.9 * min(sd, IQR / 1.34) * m^(-1/5); IQR from type-7
// quantiles. Falls back to sd when the IQR is zero.
double silverman_bandwidth(std::vector<double> sample);

MarginalDensity fit_marginal(const std::vector<double>& class_values, const VariableKind& kind,
                             double column_range);

NbModel fit_nb(const Dataset& ds, const std::vector<std::string>& vars, const std::string& outcome,
               PriorMode prior_mode = PriorMode::Empirical);

// Log-space posterior; returns p1.
double predict_row(const NbModel& model, const Dataset& ds, std::size_t row);
Probabilities predict_nb(const NbModel& model, const Dataset& ds);

struct WrapperStep {
  std::string variable;
  double learning_score = 0.0;    // mean of the two per-class Brier scores
  double validation_score = 0.0;
};

struct WrapperResult {
  std::vector<std::string> variables;  // selection order
  std::vector<WrapperStep> trace;      // one entry per selected variable
  std::string rejected;                // candidate whose addition stopped the search
  double rejected_learning_score = 0.0;
  double rejected_validation_score = 0.0;
  std::vector<std::size_t> learning_rows;
  std::vector<std::size_t> validation_rows;
};

struct WrapperOptions {
  double learning_fraction = 0.75;
  PriorMode prior_mode = PriorMode::Empirical;
  std::uint64_t seed = 0;
};

// Best pair on the learning set, then greedy forward additions ranked on the
// learning set until the validation score stops improving.
WrapperResult nb_wrapper_select(const Dataset& ds, const std::string& outcome,
                                const std::vector<std::string>& candidates,
                                const WrapperOptions& opts);

// Seeded stratified split; returns (first, second) row lists in row order.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(
    std::span<const std::uint8_t> labels, double first_fraction, std::uint64_t seed);

}  // namespace periop::nb

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "periop/data.hpp"
#include "periop/metrics.hpp"

namespace periop::logit {

// Columns contributed by one predictor. Factors with L levels expand to L-1
// indicators (first level is the reference); continuous and binary predictors
// contribute one column.
struct DesignBlock {
  std::string variable;
  std::size_t var_index = 0;
  std::size_t first = 0;  // column offset (intercept is column 0)
  std::size_t count = 0;
};

struct DesignLayout {
  std::vector<DesignBlock> blocks;
  std::vector<std::string> column_names;  // "(Intercept)", "age", "ASA12/34:3", ...

  std::size_t n_columns() const noexcept { return column_names.size(); }
};

struct DesignMatrix {
  Eigen::MatrixXd x;  // rows x columns, column 0 all ones
  DesignLayout layout;
};

DesignLayout design_layout(const Schema& schema, const std::vector<std::string>& vars);

// Training design: rejects Missing cells and factors with a single observed
// level.
DesignMatrix build_design(const Dataset& ds, const std::vector<std::string>& vars);
// Design for new rows under an existing layout.
DesignMatrix build_design(const Dataset& ds, const DesignLayout& layout);

// Per-class likelihood weights. `unit()` is the ordinary likelihood.
struct ClassWeights {
  double w0 = 1.0;
  double w1 = 1.0;

  static ClassWeights unit() { return {1.0, 1.0}; }
  ClassWeights normalized() const;
  double of(std::uint8_t y) const noexcept { return y ? w1 : w0; }
};

// w_j proportional to 1 / n_j, summing to one.
ClassWeights balanced_weights(std::span<const std::uint8_t> y);

enum class AicMode {
  Direct,    // -2 l_w + 2k
  Rescaled,  // -2 l_w * n / sum(w_i) + 2k
};

struct FitOptions {
  int max_iterations = 100;
  double score_tolerance = 1e-8;
  double relative_loglik_tolerance = 1e-10;
  double separation_eta = 30.0;
  double ridge_jitter = 1e-8;
  AicMode aic_mode = AicMode::Direct;
};

struct LogitFit {
  Eigen::VectorXd beta;
  DesignLayout layout;
  ClassWeights weights;
  double loglik = 0.0;       // weighted log-likelihood at beta
  double null_loglik = 0.0;  // intercept-only weighted log-likelihood
  double aic = 0.0;
  double max_score = 0.0;    // max |gradient| at beta
  std::size_t n_rows = 0;
  int iterations = 0;
  bool converged = false;
  bool separation = false;
};

double weighted_loglik(const Eigen::MatrixXd& x, std::span<const std::uint8_t> y,
                       const Eigen::VectorXd& beta, ClassWeights w);
Eigen::VectorXd weighted_score(const Eigen::MatrixXd& x, std::span<const std::uint8_t> y,
                               const Eigen::VectorXd& beta, ClassWeights w);

// Newton-Raphson with step halving on the weighted log-likelihood.
LogitFit fit(const DesignMatrix& dm, std::span<const std::uint8_t> y, ClassWeights w,
             const FitOptions& opts = {});

Probabilities predict(const LogitFit& fit, const DesignMatrix& dm);

enum class Direction { Forward, Backward, Both };

struct StepwiseStep {
  std::string move;      // "start", "add" or "remove"
  std::string variable;  // empty for "start"
  double aic = 0.0;
  std::vector<std::string> variables;  // model after the move
};

struct StepwiseResult {
  std::vector<std::string> variables;  // final model, schema order
  std::vector<StepwiseStep> trace;     // accepted moves; AIC nonincreasing
  LogitFit final_fit;
};

// Greedy AIC search over whole predictor blocks. Forward and Both start from
// the intercept-only model, Backward from the full model. Equal-AIC moves are
// resolved toward the lowest variable index.
StepwiseResult stepwise_select(const Dataset& ds, const std::string& outcome,
                               const std::vector<std::string>& candidates, Direction direction,
                               ClassWeights w, const FitOptions& opts = {});

}  // namespace periop::logit

#include "periop/nbkde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <thread>
#include <tuple>

#include "periop/stats.hpp"

namespace periop::nb {

namespace {

double log_sum_exp(std::span<const double> v) {
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

double MarginalDensity::log_density(double x) const {
  if (!continuous) {
    const auto level = static_cast<std::size_t>(x);
    if (x < 0 || level >= pmf.size()) fail(ErrorCode::InvalidArgument, "level outside the fitted pmf");
    return std::log(pmf[level]);
  }
  thread_local std::vector<double> terms;
  terms.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double z = (x - points[i]) / bandwidth;
    terms[i] = -0.5 * z * z;
  }
  const double norm = static_cast<double>(points.size()) * bandwidth *
                      std::sqrt(2.0 * std::numbers::pi);
  return log_sum_exp(terms) - std::log(norm);
}

double MarginalDensity::density(double x) const { return std::exp(log_density(x)); }

double silverman_bandwidth(std::vector<double> sample) {
  if (sample.size() < 2) return 0.0;
  std::sort(sample.begin(), sample.end());
  const double sd = sample_sd(sample);
  const double iqr = quantile_sorted(sample, 0.75) - quantile_sorted(sample, 0.25);
  double lo = std::min(sd, iqr / 1.34);
  if (!(lo > 0.0)) lo = sd;
  if (!(lo > 0.0)) return 0.0;
  return 0.9 * lo * std::pow(static_cast<double>(sample.size()), -0.2);
}

MarginalDensity fit_marginal(const std::vector<double>& class_values, const VariableKind& kind,
                             double column_range) {
  MarginalDensity m;
  if (kind.is_continuous()) {
    if (class_values.empty()) fail(ErrorCode::OneClassOnly, "no sample points for a class");
    m.continuous = true;
    m.points = class_values;
    const double floor = 1e-6 * (column_range > 0.0 ? column_range : 1.0);
    const double h = silverman_bandwidth(class_values);
    m.bandwidth = std::max(h, floor);
    m.bandwidth_floored = !(h > floor);
    return m;
  }
  m.continuous = false;
  const std::size_t levels = kind.cardinality();
  std::vector<double> counts(levels, 0.0);
  for (double v : class_values) counts.at(static_cast<std::size_t>(v)) += 1.0;
  const double denom = static_cast<double>(class_values.size()) + 0.5 * static_cast<double>(levels);
  m.pmf.resize(levels);
  for (std::size_t l = 0; l < levels; ++l) m.pmf[l] = (counts[l] + 0.5) / denom;
  return m;
}

namespace {

std::vector<std::size_t> resolve_vars(const Dataset& ds, const std::vector<std::string>& vars) {
  std::vector<std::size_t> out;
  for (const auto& v : vars) {
    const std::size_t idx = ds.schema().require_index(v);
    if (ds.missing_count(idx) > 0)
      fail(ErrorCode::MissingValuePresent, "missing values in '" + v + "'");
    out.push_back(idx);
  }
  return out;
}

std::array<double, 2> priors_for(std::size_t n0, std::size_t n1, PriorMode mode) {
  if (mode == PriorMode::Equal) return {0.5, 0.5};
  const double n = static_cast<double>(n0 + n1);
  return {static_cast<double>(n0) / n, static_cast<double>(n1) / n};
}

// Marginals for one variable fit on a subset of rows.
std::array<MarginalDensity, 2> fit_variable(const Dataset& ds, std::size_t var,
                                            std::span<const std::uint8_t> y,
                                            std::span<const std::size_t> rows) {
  std::array<std::vector<double>, 2> values;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t r : rows) {
    const double v = ds.at(r, var).numeric();
    values[y[r]].push_back(v);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const auto& kind = ds.schema().variable(var).kind;
  return {fit_marginal(values[0], kind, hi - lo), fit_marginal(values[1], kind, hi - lo)};
}

double posterior_p1(double log_joint0, double log_joint1) {
  // p1 = 1 / (1 + exp(l0 - l1))
  const double d = log_joint0 - log_joint1;
  if (d > 0) {
    const double e = std::exp(-d);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(d));
}

}  // namespace

NbModel fit_nb(const Dataset& ds, const std::vector<std::string>& vars, const std::string& outcome,
               PriorMode prior_mode) {
  const auto y = ds.outcome(outcome);
  const auto counts = class_counts(y);
  if (counts.n0 == 0 || counts.n1 == 0) fail(ErrorCode::OneClassOnly, "Naive Bayes needs both classes");
  NbModel model;
  model.variables = vars;
  model.var_indices = resolve_vars(ds, vars);
  model.priors = priors_for(counts.n0, counts.n1, prior_mode);
  std::vector<std::size_t> rows(ds.n_rows());
  std::iota(rows.begin(), rows.end(), 0);
  for (std::size_t var : model.var_indices) {
    auto pair = fit_variable(ds, var, y, rows);
    model.marginals[0].push_back(std::move(pair[0]));
    model.marginals[1].push_back(std::move(pair[1]));
  }
  return model;
}

double predict_row(const NbModel& model, const Dataset& ds, std::size_t row) {
  double l0 = std::log(model.priors[0]);
  double l1 = std::log(model.priors[1]);
  for (std::size_t p = 0; p < model.var_indices.size(); ++p) {
    const Cell& cell = ds.at(row, model.var_indices[p]);
    if (cell.is_missing())
      fail(ErrorCode::MissingValuePresent, "row lacks a value for '" + model.variables[p] + "'");
    const double x = cell.numeric();
    l0 += model.marginals[0][p].log_density(x);
    l1 += model.marginals[1][p].log_density(x);
  }
  return posterior_p1(l0, l1);
}

Probabilities predict_nb(const NbModel& model, const Dataset& ds) {
  for (std::size_t p = 0; p < model.var_indices.size(); ++p)
    if (model.var_indices[p] >= ds.n_vars() ||
        ds.schema().variable(model.var_indices[p]).name != model.variables[p])
      fail(ErrorCode::DimensionMismatch, "dataset schema does not match the model");
  Probabilities out(ds.n_rows());
  for (std::size_t r = 0; r < ds.n_rows(); ++r) out[r] = predict_row(model, ds, r);
  return out;
}

// ---------------------------------------------------------------------------
// Wrapper

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(
    std::span<const std::uint8_t> labels, double first_fraction, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<bool> in_first(labels.size(), false);
  for (std::uint8_t cls = 0; cls < 2; ++cls) {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < labels.size(); ++r)
      if (labels[r] == cls) rows.push_back(r);
    std::shuffle(rows.begin(), rows.end(), rng);
    const auto take = static_cast<std::size_t>(std::llround(first_fraction * static_cast<double>(rows.size())));
    for (std::size_t i = 0; i < take && i < rows.size(); ++i) in_first[rows[i]] = true;
  }
  std::pair<std::vector<std::size_t>, std::vector<std::size_t>> out;
  for (std::size_t r = 0; r < labels.size(); ++r) (in_first[r] ? out.first : out.second).push_back(r);
  return out;
}

namespace {

// Cached per-row log marginals: log_f[var][class][row].
class SubsetScorer {
 public:
  SubsetScorer(const Dataset& ds, std::span<const std::uint8_t> y,
               const std::vector<std::size_t>& vars, std::span<const std::size_t> learn,
               std::array<double, 2> priors)
      : y_(y), priors_{std::log(priors[0]), std::log(priors[1])} {
    log_f_.resize(vars.size());
    parallel_for(vars.size(), std::thread::hardware_concurrency(), [&](std::size_t v) {
      const auto dens = fit_variable(ds, vars[v], y, learn);
      for (int c = 0; c < 2; ++c) {
        log_f_[v][c].resize(ds.n_rows());
        for (std::size_t r = 0; r < ds.n_rows(); ++r)
          log_f_[v][c][r] = dens[c].log_density(ds.at(r, vars[v]).numeric());
      }
    });
  }

  // Mean of the two per-class Brier scores over `rows` for the subset.
  double score(const std::vector<std::size_t>& subset, std::span<const std::size_t> rows) const {
    double s[2] = {0.0, 0.0};
    std::size_t n[2] = {0, 0};
    for (std::size_t r : rows) {
      double l0 = priors_[0], l1 = priors_[1];
      for (std::size_t v : subset) {
        l0 += log_f_[v][0][r];
        l1 += log_f_[v][1][r];
      }
      const double p1 = posterior_p1(l0, l1);
      const auto c = y_[r];
      const double e = static_cast<double>(c) - p1;
      s[c] += e * e;
      n[c]++;
    }
    if (n[0] == 0 || n[1] == 0) fail(ErrorCode::OneClassOnly, "wrapper subset lacks a class");
    return 0.5 * (s[0] / static_cast<double>(n[0]) + s[1] / static_cast<double>(n[1]));
  }

 private:
  std::span<const std::uint8_t> y_;
  std::array<double, 2> priors_;
  std::vector<std::array<std::vector<double>, 2>> log_f_;
};

}  // namespace

WrapperResult nb_wrapper_select(const Dataset& ds, const std::string& outcome,
                                const std::vector<std::string>& candidates,
                                const WrapperOptions& opts) {
  if (candidates.size() < 2) fail(ErrorCode::InvalidArgument, "wrapper needs at least two candidates");
  const auto y = ds.outcome(outcome);
  std::vector<std::size_t> vars = resolve_vars(ds, candidates);

  WrapperResult result;
  std::tie(result.learning_rows, result.validation_rows) =
      stratified_split(y, opts.learning_fraction, opts.seed);
  const auto& learn = result.learning_rows;
  const auto& valid = result.validation_rows;
  std::size_t learn_n[2] = {0, 0}, valid_n[2] = {0, 0};
  for (std::size_t r : learn) learn_n[y[r]]++;
  for (std::size_t r : valid) valid_n[y[r]]++;
  if (!learn_n[0] || !learn_n[1] || !valid_n[0] || !valid_n[1])
    fail(ErrorCode::OneClassOnly, "learning and validation sets each need both classes");

  const SubsetScorer scorer(ds, y, vars, learn, priors_for(learn_n[0], learn_n[1], opts.prior_mode));
  const std::size_t d = vars.size();

  // Seed pair: exhaustive, lowest (i, j) on ties.
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> chosen;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) {
      const double s = scorer.score({i, j}, learn);
      if (s < best) {
        best = s;
        chosen = {i, j};
      }
    }
  double valid_score = scorer.score(chosen, valid);
  for (std::size_t v : chosen) result.trace.push_back({candidates[v], best, valid_score});

  std::vector<bool> used(d, false);
  for (std::size_t v : chosen) used[v] = true;
  while (chosen.size() < d) {
    double best_learn = std::numeric_limits<double>::infinity();
    std::size_t pick = d;
    for (std::size_t v = 0; v < d; ++v) {
      if (used[v]) continue;
      auto trial = chosen;
      trial.push_back(v);
      const double s = scorer.score(trial, learn);
      if (s < best_learn) {
        best_learn = s;
        pick = v;
      }
    }
    auto trial = chosen;
    trial.push_back(pick);
    const double trial_valid = scorer.score(trial, valid);
    if (!(trial_valid < valid_score)) {
      result.rejected = candidates[pick];
      result.rejected_learning_score = best_learn;
      result.rejected_validation_score = trial_valid;
      break;
    }
    chosen = std::move(trial);
    used[pick] = true;
    valid_score = trial_valid;
    result.trace.push_back({candidates[pick], best_learn, valid_score});
  }
  for (std::size_t v : chosen) result.variables.push_back(candidates[v]);
  return result;
}

}  // namespace periop::nb

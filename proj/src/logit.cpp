#include "periop/logit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace periop::logit {

// ---------------------------------------------------------------------------
// Design

DesignLayout design_layout(const Schema& schema, const std::vector<std::string>& vars) {
  DesignLayout layout;
  layout.column_names.push_back("(Intercept)");
  std::vector<std::size_t> idx;
  for (const auto& name : vars) idx.push_back(schema.require_index(name));
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (idx[i] == idx[j]) fail(ErrorCode::InvalidArgument, "duplicate predictor '" + vars[i] + "'");

  for (std::size_t i = 0; i < vars.size(); ++i) {
    const Variable& v = schema.variable(idx[i]);
    DesignBlock block{v.name, idx[i], layout.column_names.size(), 0};
    if (v.kind.is_factor()) {
      for (std::size_t l = 1; l < v.kind.cardinality(); ++l)
        layout.column_names.push_back(v.name + ":" + v.kind.levels()[l]);
      block.count = v.kind.cardinality() - 1;
    } else {
      layout.column_names.push_back(v.name);
      block.count = 1;
    }
    layout.blocks.push_back(block);
  }
  return layout;
}

DesignMatrix build_design(const Dataset& ds, const DesignLayout& layout) {
  DesignMatrix dm;
  dm.layout = layout;
  const auto n = static_cast<Eigen::Index>(ds.n_rows());
  dm.x = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(layout.n_columns()));
  dm.x.col(0).setOnes();
  for (const auto& b : layout.blocks) {
    if (b.var_index >= ds.n_vars() || ds.schema().variable(b.var_index).name != b.variable)
      fail(ErrorCode::DimensionMismatch, "design layout does not match dataset schema");
    const auto& kind = ds.schema().variable(b.var_index).kind;
    for (Eigen::Index r = 0; r < n; ++r) {
      const Cell& cell = ds.at(static_cast<std::size_t>(r), b.var_index);
      if (cell.is_missing())
        fail(ErrorCode::MissingValuePresent, "missing value in predictor '" + b.variable + "'");
      const auto col = static_cast<Eigen::Index>(b.first);
      if (kind.is_factor()) {
        const std::size_t level = cell.level();
        if (level > 0) dm.x(r, col + static_cast<Eigen::Index>(level) - 1) = 1.0;
      } else {
        dm.x(r, col) = cell.numeric();
      }
    }
  }
  return dm;
}

DesignMatrix build_design(const Dataset& ds, const std::vector<std::string>& vars) {
  DesignLayout layout = design_layout(ds.schema(), vars);
  for (const auto& b : layout.blocks) {
    const auto& kind = ds.schema().variable(b.var_index).kind;
    if (!kind.is_factor()) continue;
    std::vector<bool> seen(kind.cardinality(), false);
    std::size_t distinct = 0;
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
      const Cell& c = ds.at(r, b.var_index);
      if (c.is_level() && !seen[c.level()]) {
        seen[c.level()] = true;
        ++distinct;
      }
    }
    if (distinct == 1)
      fail(ErrorCode::ConstantFactor, "factor '" + b.variable + "' has a single observed level");
  }
  return build_design(ds, layout);
}

// ---------------------------------------------------------------------------
// Weights

ClassWeights ClassWeights::normalized() const {
  if (!(w0 > 0.0 && w1 > 0.0)) fail(ErrorCode::InvalidArgument, "class weights must be positive");
  const double s = w0 + w1;
  return {w0 / s, w1 / s};
}

ClassWeights balanced_weights(std::span<const std::uint8_t> y) {
  const auto c = class_counts(y);
  if (c.n0 == 0 || c.n1 == 0) fail(ErrorCode::OneClassOnly, "balanced weights need both classes");
  return ClassWeights{1.0 / static_cast<double>(c.n0), 1.0 / static_cast<double>(c.n1)}.normalized();
}

// ---------------------------------------------------------------------------
// Likelihood

namespace {

// log(1 + exp(t)) without overflow.
double softplus(double t) { return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

double sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double loglik_from_eta(const Eigen::VectorXd& eta, std::span<const std::uint8_t> y, ClassWeights w) {
  double l = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const auto yi = y[static_cast<std::size_t>(i)];
    l -= w.of(yi) * softplus(yi ? -eta(i) : eta(i));
  }
  return l;
}

void check_fit_inputs(const Eigen::MatrixXd& x, std::span<const std::uint8_t> y) {
  if (static_cast<std::size_t>(x.rows()) != y.size())
    fail(ErrorCode::DimensionMismatch, "design rows and labels differ in length");
  const auto c = class_counts(y);
  if (c.n0 == 0 || c.n1 == 0) fail(ErrorCode::OneClassOnly, "logistic fit needs both classes");
}

}  // namespace

double weighted_loglik(const Eigen::MatrixXd& x, std::span<const std::uint8_t> y,
                       const Eigen::VectorXd& beta, ClassWeights w) {
  return loglik_from_eta(x * beta, y, w);
}

Eigen::VectorXd weighted_score(const Eigen::MatrixXd& x, std::span<const std::uint8_t> y,
                               const Eigen::VectorXd& beta, ClassWeights w) {
  const Eigen::VectorXd eta = x * beta;
  Eigen::VectorXd r(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const auto yi = y[static_cast<std::size_t>(i)];
    r(i) = w.of(yi) * (static_cast<double>(yi) - sigmoid(eta(i)));
  }
  return x.transpose() * r;
}

LogitFit fit(const DesignMatrix& dm, std::span<const std::uint8_t> y, ClassWeights w,
             const FitOptions& opts) {
  const Eigen::MatrixXd& x = dm.x;
  check_fit_inputs(x, y);
  if (!(w.w0 > 0.0 && w.w1 > 0.0)) fail(ErrorCode::InvalidArgument, "class weights must be positive");
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();

  LogitFit out;
  out.layout = dm.layout;
  out.weights = w;
  out.n_rows = static_cast<std::size_t>(n);

  double sum_w = 0.0, sw1 = 0.0, sw0 = 0.0;
  for (auto yi : y) {
    sum_w += w.of(yi);
    (yi ? sw1 : sw0) += w.of(yi);
  }
  const double pi0 = sw1 / (sw0 + sw1);
  out.null_loglik = sw1 * std::log(pi0) + sw0 * std::log1p(-pi0);

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd eta = Eigen::VectorXd::Zero(n);
  double ll = loglik_from_eta(eta, y, w);
  Eigen::VectorXd resid(n), hw(n);

  auto gradient = [&](const Eigen::VectorXd& e, bool with_hessian) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto yi = y[static_cast<std::size_t>(i)];
      const double mu = sigmoid(e(i));
      resid(i) = w.of(yi) * (static_cast<double>(yi) - mu);
      if (with_hessian) hw(i) = w.of(yi) * mu * (1.0 - mu);
    }
    return Eigen::VectorXd(x.transpose() * resid);
  };

  bool converged = false;
  bool separated = false;
  bool polished = false;
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    const Eigen::VectorXd g = gradient(eta, true);
    if (g.cwiseAbs().maxCoeff() < opts.score_tolerance) {
      converged = true;
      break;
    }
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(p, p);
    h.selfadjointView<Eigen::Lower>().rankUpdate((x.array().colwise() * hw.array().sqrt()).matrix().transpose());
    h.triangularView<Eigen::StrictlyUpper>() = h.transpose();

    Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
    auto usable = [&](const Eigen::LDLT<Eigen::MatrixXd>& f) {
      if (f.info() != Eigen::Success || !f.isPositive()) return false;
      const Eigen::VectorXd d = f.vectorD().cwiseAbs();
      return d.minCoeff() > 1e-12 * std::max(d.maxCoeff(), 1e-300);
    };
    if (!usable(ldlt)) {
      h.diagonal().array() += opts.ridge_jitter;
      ldlt.compute(h);
      if (ldlt.info() != Eigen::Success)
        fail(ErrorCode::SingularHessian, "Hessian singular even after ridge jitter");
    }
    const Eigen::VectorXd step = ldlt.solve(g);
    if (!step.allFinite()) fail(ErrorCode::SingularHessian, "non-finite Newton step");

    // near the optimum the likelihood change drops below double resolution
    const double rounding = 1e-13 * std::max(std::abs(ll), 1.0);
    double t = 1.0;
    Eigen::VectorXd cand_beta, cand_eta;
    double cand_ll = -std::numeric_limits<double>::infinity();
    for (int halving = 0; halving < 40; ++halving, t *= 0.5) {
      cand_beta = beta + t * step;
      cand_eta = x * cand_beta;
      cand_ll = loglik_from_eta(cand_eta, y, w);
      if (cand_ll >= ll - rounding) break;
    }
    if (!(cand_ll >= ll - rounding)) {
      // No ascent along the Newton direction: we are at the numerical optimum.
      converged = true;
      break;
    }
    const double rel = std::abs(cand_ll - ll) / std::max(std::abs(ll), 1e-300);
    beta = cand_beta;
    eta = cand_eta;
    ll = cand_ll;
    if (rel < opts.relative_loglik_tolerance) {
      // one more Newton step once the likelihood has flattened
      if (polished) {
        converged = true;
        ++it;
        break;
      }
      polished = true;
    }
    if (eta.cwiseAbs().maxCoeff() > opts.separation_eta) {
      const Eigen::VectorXd g_new = gradient(eta, false);
      if (g_new.cwiseAbs().maxCoeff() >= opts.score_tolerance) {
        separated = true;
        ++it;
        break;
      }
    }
  }

  out.beta = beta;
  out.loglik = ll;
  out.iterations = it;
  out.converged = converged && !separated;
  out.separation = separated;
  out.max_score = gradient(eta, false).cwiseAbs().maxCoeff();
  const double k = static_cast<double>(p);
  out.aic = opts.aic_mode == AicMode::Direct
                ? -2.0 * ll + 2.0 * k
                : -2.0 * ll * static_cast<double>(n) / sum_w + 2.0 * k;
  return out;
}

Probabilities predict(const LogitFit& fit, const DesignMatrix& dm) {
  if (dm.x.cols() != fit.beta.size())
    fail(ErrorCode::DimensionMismatch, "design has " + std::to_string(dm.x.cols()) +
                                           " columns, coefficients " + std::to_string(fit.beta.size()));
  const Eigen::VectorXd eta = dm.x * fit.beta;
  Probabilities p(static_cast<std::size_t>(eta.size()));
  for (Eigen::Index i = 0; i < eta.size(); ++i) p[static_cast<std::size_t>(i)] = sigmoid(eta(i));
  return p;
}

// ---------------------------------------------------------------------------
// Stepwise

namespace {

struct Candidate {
  std::string name;
  std::size_t var_index;
};

// Fits the model on a subset of blocks of a precomputed full design.
class SubsetFitter {
 public:
  SubsetFitter(const Dataset& ds, const std::vector<Candidate>& cands,
               std::span<const std::uint8_t> y, ClassWeights w, const FitOptions& opts)
      : y_(y), w_(w), opts_(opts) {
    std::vector<std::string> names;
    for (const auto& c : cands) names.push_back(c.name);
    full_ = build_design(ds, names);
  }

  LogitFit fit_subset(const std::vector<bool>& in) const {
    DesignMatrix dm;
    std::vector<Eigen::Index> cols{0};
    dm.layout.column_names.push_back("(Intercept)");
    for (std::size_t b = 0; b < full_.layout.blocks.size(); ++b) {
      if (!in[b]) continue;
      DesignBlock blk = full_.layout.blocks[b];
      const std::size_t old_first = blk.first;
      blk.first = dm.layout.column_names.size();
      for (std::size_t c = 0; c < blk.count; ++c) {
        cols.push_back(static_cast<Eigen::Index>(old_first + c));
        dm.layout.column_names.push_back(full_.layout.column_names[old_first + c]);
      }
      dm.layout.blocks.push_back(blk);
    }
    dm.x.resize(full_.x.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c)
      dm.x.col(static_cast<Eigen::Index>(c)) = full_.x.col(cols[c]);
    return fit(dm, y_, w_, opts_);
  }

 private:
  DesignMatrix full_;
  std::span<const std::uint8_t> y_;
  ClassWeights w_;
  FitOptions opts_;
};

}  // namespace

StepwiseResult stepwise_select(const Dataset& ds, const std::string& outcome,
                               const std::vector<std::string>& candidates, Direction direction,
                               ClassWeights w, const FitOptions& opts) {
  if (candidates.empty()) fail(ErrorCode::InvalidArgument, "stepwise selection needs candidates");
  std::vector<Candidate> cands;
  for (const auto& name : candidates) cands.push_back({name, ds.schema().require_index(name)});
  std::sort(cands.begin(), cands.end(),
            [](const Candidate& a, const Candidate& b) { return a.var_index < b.var_index; });

  const auto y = ds.outcome(outcome);
  const SubsetFitter fitter(ds, cands, y, w, opts);
  const std::size_t d = cands.size();

  std::vector<bool> in(d, direction == Direction::Backward);
  auto current_names = [&]() {
    std::vector<std::string> v;
    for (std::size_t b = 0; b < d; ++b)
      if (in[b]) v.push_back(cands[b].name);
    return v;
  };

  StepwiseResult result;
  LogitFit current = fitter.fit_subset(in);
  result.trace.push_back({"start", "", current.aic, current_names()});

  while (true) {
    // Blocks are in schema order, so scanning b ascending with strict
    // improvement keeps the lowest-index move on equal AIC.
    double best_aic = current.aic;
    std::size_t best_block = d;
    LogitFit best_fit;
    for (std::size_t b = 0; b < d; ++b) {
      const bool adding = !in[b];
      if (adding && direction == Direction::Backward) continue;
      if (!adding && direction == Direction::Forward) continue;
      std::vector<bool> trial = in;
      trial[b] = adding;
      LogitFit f;
      try {
        f = fitter.fit_subset(trial);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::SingularHessian) continue;
        throw;
      }
      if (f.aic < best_aic) {
        best_aic = f.aic;
        best_block = b;
        best_fit = std::move(f);
      }
    }
    if (best_block == d) break;
    const bool added = !in[best_block];
    in[best_block] = added;
    current = std::move(best_fit);
    result.trace.push_back({added ? "add" : "remove", cands[best_block].name, current.aic,
                            current_names()});
  }

  result.variables = current_names();
  result.final_fit = std::move(current);
  return result;
}

}  // namespace periop::logit

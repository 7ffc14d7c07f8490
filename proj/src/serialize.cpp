#include "periop/serialize.hpp"

#include <fstream>
#include <sstream>

namespace periop::io {

namespace {

template <typename F>
auto guarded(const char* what, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidConfig, std::string(what) + ": " + e.what());
  }
}

Json vec(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

}  // namespace

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json parse_json(const std::string& text) {
  return guarded("malformed JSON", [&] { return Json::parse(text); });
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json(const std::filesystem::path& path) { return parse_json(read_text(path)); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) fail(ErrorCode::IoError, "write failed for '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// Schema

Json to_json(const Schema& schema) {
  Json vars = Json::array();
  for (const auto& v : schema.variables()) {
    Json e{{"name", v.name}, {"kind", std::string(to_string(v.kind.tag()))}};
    if (v.kind.is_factor()) e["levels"] = v.kind.levels();
    vars.push_back(std::move(e));
  }
  return Json{{"variables", vars}, {"outcomes", schema.outcomes()}, {"metadata", schema.metadata()}};
}

Schema schema_from_json(const Json& j) {
  return guarded("invalid schema JSON", [&] {
    std::vector<Variable> vars;
    for (const auto& e : j.at("variables")) {
      const std::string kind = e.at("kind").get<std::string>();
      VariableKind k = VariableKind::continuous();
      if (kind == "continuous") k = VariableKind::continuous();
      else if (kind == "binary") k = VariableKind::binary();
      else if (kind == "ordinal") k = VariableKind::ordinal(e.at("levels").get<std::vector<std::string>>());
      else if (kind == "nominal") k = VariableKind::nominal(e.at("levels").get<std::vector<std::string>>());
      else fail(ErrorCode::InvalidSchema, "unknown kind '" + kind + "'");
      vars.push_back({e.at("name").get<std::string>(), k});
    }
    std::vector<std::string> meta;
    if (j.contains("metadata")) meta = j.at("metadata").get<std::vector<std::string>>();
    return Schema(std::move(vars), j.at("outcomes").get<std::vector<std::string>>(), std::move(meta));
  });
}

// ---------------------------------------------------------------------------
// Cohort spec

namespace {

Json feature_json(const synth::Feature& f) {
  return Json{{"variable", f.variable}, {"level", f.level}, {"center", f.center}, {"scale", f.scale}};
}

synth::Feature feature_from(const Json& j) {
  synth::Feature f;
  f.variable = j.at("variable").get<std::string>();
  f.level = j.value("level", std::string());
  f.center = j.value("center", 0.0);
  f.scale = j.value("scale", 1.0);
  return f;
}

}  // namespace

Json to_json(const synth::CohortSpec& spec) {
  Json vars = Json::array();
  for (const auto& v : spec.variables) {
    Json m = std::visit(
        [](const auto& mm) -> Json {
          using T = std::decay_t<decltype(mm)>;
          if constexpr (std::is_same_v<T, synth::BernoulliMarginal>) return {{"type", "bernoulli"}, {"p", mm.p}};
          else if constexpr (std::is_same_v<T, synth::CategoricalMarginal>)
            return {{"type", "categorical"}, {"levels", mm.levels}, {"probs", mm.probs}, {"ordinal", mm.ordinal}};
          else if constexpr (std::is_same_v<T, synth::TruncNormalMarginal>)
            return {{"type", "truncnormal"}, {"mean", mm.mean}, {"sd", mm.sd}, {"lo", mm.lo},
                    {"hi", mm.hi},           {"integer", mm.integer}};
          else return {{"type", "uniform"}, {"lo", mm.lo}, {"hi", mm.hi}};
        },
        v.marginal);
    vars.push_back(Json{{"name", v.name}, {"missing_rate", v.missing_rate}, {"marginal", m}});
  }
  Json outcomes = Json::array();
  for (const auto& o : spec.outcomes) {
    Json effects = Json::array(), inter = Json::array();
    for (const auto& e : o.effects) {
      Json f = feature_json(e.feature);
      f["coef"] = e.coef;
      effects.push_back(f);
    }
    for (const auto& i : o.interactions)
      inter.push_back(Json{{"a", feature_json(i.a)}, {"b", feature_json(i.b)}, {"coef", i.coef}});
    outcomes.push_back(Json{{"name", o.name},
                            {"intercept", o.intercept},
                            {"target_prevalence", o.target_prevalence ? Json(*o.target_prevalence) : Json()},
                            {"effects", effects},
                            {"interactions", inter}});
  }
  Json year;
  if (spec.year)
    year = Json{{"train_rows", spec.year->train_rows},
                {"first_year", spec.year->first_year},
                {"last_train_year", spec.year->last_train_year},
                {"test_year", spec.year->test_year}};
  return Json{{"name", spec.name}, {"n_rows", spec.n_rows}, {"seed", spec.seed},
              {"year", year},      {"variables", vars},     {"outcomes", outcomes}};
}

synth::CohortSpec cohort_spec_from_json(const Json& j) {
  return guarded("invalid cohort spec", [&] {
    synth::CohortSpec s;
    s.name = j.value("name", std::string("custom"));
    s.n_rows = j.at("n_rows").get<std::size_t>();
    s.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("year") && !j.at("year").is_null()) {
      const auto& y = j.at("year");
      synth::YearColumn yc;
      yc.train_rows = y.at("train_rows").get<std::size_t>();
      yc.first_year = y.value("first_year", yc.first_year);
      yc.last_train_year = y.value("last_train_year", yc.last_train_year);
      yc.test_year = y.value("test_year", yc.test_year);
      s.year = yc;
    }
    for (const auto& v : j.at("variables")) {
      const auto& m = v.at("marginal");
      const std::string type = m.at("type").get<std::string>();
      synth::Marginal marg;
      if (type == "bernoulli") marg = synth::BernoulliMarginal{m.at("p").get<double>()};
      else if (type == "categorical")
        marg = synth::CategoricalMarginal{m.at("levels").get<std::vector<std::string>>(),
                                          m.at("probs").get<std::vector<double>>(), m.value("ordinal", true)};
      else if (type == "truncnormal")
        marg = synth::TruncNormalMarginal{m.at("mean").get<double>(), m.at("sd").get<double>(),
                                          m.value("lo", -1e300), m.value("hi", 1e300), m.value("integer", false)};
      else if (type == "uniform") marg = synth::UniformMarginal{m.at("lo").get<double>(), m.at("hi").get<double>()};
      else fail(ErrorCode::InvalidSpec, "unknown marginal type '" + type + "'");
      s.variables.push_back({v.at("name").get<std::string>(), marg, v.value("missing_rate", 0.0)});
    }
    for (const auto& o : j.at("outcomes")) {
      synth::OutcomeModel m;
      m.name = o.at("name").get<std::string>();
      m.intercept = o.value("intercept", 0.0);
      if (o.contains("target_prevalence") && !o.at("target_prevalence").is_null())
        m.target_prevalence = o.at("target_prevalence").get<double>();
      if (o.contains("effects"))
        for (const auto& e : o.at("effects")) m.effects.push_back({feature_from(e), e.at("coef").get<double>()});
      if (o.contains("interactions"))
        for (const auto& i : o.at("interactions"))
          m.interactions.push_back({feature_from(i.at("a")), feature_from(i.at("b")), i.at("coef").get<double>()});
      s.outcomes.push_back(std::move(m));
    }
    synth::validate(s);
    return s;
  });
}

Json truth_json(const synth::CohortSpec& spec, const synth::GeneratedCohort& cohort) {
  Json intercepts = Json::object(), probs = Json::object();
  for (std::size_t k = 0; k < spec.outcomes.size(); ++k) {
    intercepts[spec.outcomes[k].name] = cohort.intercepts[k];
    probs[spec.outcomes[k].name] = cohort.truth[k];
  }
  return Json{{"spec", to_json(spec)}, {"intercepts", intercepts}, {"probabilities", probs}};
}

Json to_json(const EvaluationReport& r) {
  return Json{{"auc", r.auc}, {"brier0", r.brier0}, {"brier1", r.brier1}, {"n0", r.n0}, {"n1", r.n1}};
}

// ---------------------------------------------------------------------------
// Models

Json to_json(const logit::LogitFit& fit) {
  std::vector<std::string> vars;
  for (const auto& b : fit.layout.blocks) vars.push_back(b.variable);
  return Json{{"type", "logit"},
              {"variables", vars},
              {"columns", fit.layout.column_names},
              {"beta", vec(fit.beta)},
              {"weights", {fit.weights.w0, fit.weights.w1}},
              {"loglik", fit.loglik},
              {"null_loglik", fit.null_loglik},
              {"aic", fit.aic},
              {"max_score", fit.max_score},
              {"n_rows", fit.n_rows},
              {"iterations", fit.iterations},
              {"converged", fit.converged},
              {"separation", fit.separation}};
}

logit::LogitFit logit_from_json(const Json& j, const Schema& schema) {
  return guarded("invalid logit model", [&] {
    logit::LogitFit fit;
    fit.layout = logit::design_layout(schema, j.at("variables").get<std::vector<std::string>>());
    if (fit.layout.column_names != j.at("columns").get<std::vector<std::string>>())
      fail(ErrorCode::DimensionMismatch, "stored design columns do not match the schema");
    const auto beta = j.at("beta").get<std::vector<double>>();
    if (beta.size() != fit.layout.n_columns()) fail(ErrorCode::DimensionMismatch, "coefficient count mismatch");
    fit.beta = Eigen::Map<const Eigen::VectorXd>(beta.data(), static_cast<Eigen::Index>(beta.size()));
    const auto w = j.at("weights").get<std::vector<double>>();
    fit.weights = {w.at(0), w.at(1)};
    fit.loglik = j.value("loglik", 0.0);
    fit.null_loglik = j.value("null_loglik", 0.0);
    fit.aic = j.value("aic", 0.0);
    fit.max_score = j.value("max_score", 0.0);
    fit.n_rows = j.value("n_rows", std::size_t{0});
    fit.iterations = j.value("iterations", 0);
    fit.converged = j.value("converged", false);
    fit.separation = j.value("separation", false);
    return fit;
  });
}

Json to_json(const nb::NbModel& model) {
  Json classes = Json::array();
  for (int c = 0; c < 2; ++c) {
    Json margs = Json::array();
    for (const auto& m : model.marginals[c]) {
      if (m.continuous)
        margs.push_back(Json{{"bandwidth", m.bandwidth}, {"floored", m.bandwidth_floored}, {"points", m.points}});
      else
        margs.push_back(Json{{"pmf", m.pmf}});
    }
    classes.push_back(margs);
  }
  return Json{{"type", "nbkde"}, {"variables", model.variables}, {"priors", model.priors}, {"marginals", classes}};
}

nb::NbModel nb_from_json(const Json& j, const Schema& schema) {
  return guarded("invalid Naive Bayes model", [&] {
    nb::NbModel m;
    m.variables = j.at("variables").get<std::vector<std::string>>();
    for (const auto& v : m.variables) m.var_indices.push_back(schema.require_index(v));
    const auto pri = j.at("priors").get<std::vector<double>>();
    m.priors = {pri.at(0), pri.at(1)};
    for (int c = 0; c < 2; ++c) {
      const auto& arr = j.at("marginals").at(static_cast<std::size_t>(c));
      if (arr.size() != m.variables.size()) fail(ErrorCode::DimensionMismatch, "marginal count mismatch");
      for (const auto& e : arr) {
        nb::MarginalDensity d;
        if (e.contains("pmf")) {
          d.continuous = false;
          d.pmf = e.at("pmf").get<std::vector<double>>();
        } else {
          d.bandwidth = e.at("bandwidth").get<double>();
          d.bandwidth_floored = e.value("floored", false);
          d.points = e.at("points").get<std::vector<double>>();
        }
        m.marginals[c].push_back(std::move(d));
      }
    }
    return m;
  });
}

Json to_json(const rf::Forest& forest) {
  Json trees = Json::array();
  for (const auto& t : forest.trees) {
    Json nodes = Json::array();
    for (const auto& n : t.nodes)
      nodes.push_back(Json::array({n.variable, n.rule.numeric ? 1 : 0, n.rule.threshold, n.rule.mask, n.left,
                                   n.right, n.n0, n.n1, n.delta_gini}));
    trees.push_back(Json{{"sample", {t.sample_n0, t.sample_n1}}, {"nodes", nodes}});
  }
  return Json{{"type", "forest"},
              {"variables", forest.variables},
              {"cardinality", forest.cardinality},
              {"aggregation", forest.aggregation == rf::Aggregation::VoteShare ? "vote" : "mean"},
              {"mtry", forest.mtry},
              {"min_node_size", forest.min_node_size},
              {"node_fields", {"variable", "numeric", "threshold", "mask", "left", "right", "n0", "n1", "delta_gini"}},
              {"trees", trees}};
}

rf::Forest forest_from_json(const Json& j) {
  return guarded("invalid forest model", [&] {
    rf::Forest f;
    f.variables = j.at("variables").get<std::vector<std::string>>();
    f.cardinality = j.at("cardinality").get<std::vector<std::size_t>>();
    f.aggregation = j.at("aggregation").get<std::string>() == "vote" ? rf::Aggregation::VoteShare
                                                                       : rf::Aggregation::MeanLeaf;
    f.mtry = j.at("mtry").get<std::size_t>();
    f.min_node_size = j.at("min_node_size").get<std::size_t>();
    for (const auto& t : j.at("trees")) {
      rf::Tree tree;
      tree.sample_n0 = t.at("sample").at(0).get<std::size_t>();
      tree.sample_n1 = t.at("sample").at(1).get<std::size_t>();
      for (const auto& n : t.at("nodes")) {
        rf::TreeNode node;
        node.variable = n.at(0).get<int>();
        node.rule.numeric = n.at(1).get<int>() != 0;
        node.rule.threshold = n.at(2).get<double>();
        node.rule.mask = n.at(3).get<std::uint64_t>();
        node.left = n.at(4).get<int>();
        node.right = n.at(5).get<int>();
        node.n0 = n.at(6).get<std::size_t>();
        node.n1 = n.at(7).get<std::size_t>();
        node.delta_gini = n.at(8).get<double>();
        tree.nodes.push_back(node);
      }
      if (tree.nodes.empty()) fail(ErrorCode::InvalidConfig, "forest tree without nodes");
      f.trees.push_back(std::move(tree));
    }
    if (f.trees.empty()) fail(ErrorCode::InvalidConfig, "forest without trees");
    return f;
  });
}

// ---------------------------------------------------------------------------
// Selection traces

Json to_json(const logit::StepwiseResult& r) {
  Json trace = Json::array();
  for (const auto& s : r.trace)
    trace.push_back(Json{{"move", s.move}, {"variable", s.variable}, {"aic", s.aic}, {"variables", s.variables}});
  return Json{{"variables", r.variables}, {"trace", trace}};
}

Json to_json(const nb::WrapperResult& r) {
  Json trace = Json::array();
  for (const auto& s : r.trace)
    trace.push_back(Json{{"variable", s.variable},
                         {"learning_score", s.learning_score},
                         {"validation_score", s.validation_score}});
  Json rejected;
  if (!r.rejected.empty())
    rejected = Json{{"variable", r.rejected},
                    {"learning_score", r.rejected_learning_score},
                    {"validation_score", r.rejected_validation_score}};
  return Json{{"variables", r.variables},
              {"trace", trace},
              {"rejected", rejected},
              {"learning_rows", r.learning_rows.size()},
              {"validation_rows", r.validation_rows.size()}};
}

Json to_json(const rf::RfWrapperResult& r) {
  Json ranking = Json::array(), trace = Json::array();
  for (const auto& e : r.ranking) ranking.push_back(Json{{"variable", e.variable}, {"mdg", e.mean_decrease_gini}});
  for (const auto& s : r.trace)
    trace.push_back(Json{{"k", s.k}, {"mean_accuracy", s.mean_accuracy}, {"fold_accuracy", s.fold_accuracy}});
  return Json{{"variables", r.variables}, {"ranking", ranking}, {"trace", trace}};
}

Json to_json(const info::HybridResult& r) {
  Json head = Json::array(), tail = Json::array();
  for (const auto& h : r.head) head.push_back(Json{{"variable", h.variable}, {"score", h.score}});
  for (const auto& t : r.tail.ranked) tail.push_back(Json{{"variable", t.variable}, {"cmi", t.cmi}});
  return Json{{"variables", r.variables}, {"head", head}, {"tail", tail}, {"elbow_index", r.tail.elbow_index}};
}

Json to_json(const FittedImputer& imputer) {
  Json tables = Json::array();
  for (const auto& t : imputer.tables) {
    Json conds = Json::array();
    for (const auto& c : t.conditioners) {
      if (const auto* d = std::get_if<DerivedDiscretization>(&c.source))
        conds.push_back(Json{{"source", d->source}, {"cutpoints", d->scheme.cutpoints}, {"labels", d->scheme.labels}});
      else
        conds.push_back(c.column());
    }
    Json cells = Json::array();
    for (const auto& [key, value] : t.cells) cells.push_back(Json{{"key", key}, {"value", value}});
    tables.push_back(Json{{"target", t.target},
                          {"statistic", t.statistic == Statistic::ConditionalMean ? "mean" : "mode"},
                          {"conditioners", conds},
                          {"marginal", t.marginal},
                          {"cells", cells}});
  }
  return Json{{"tables", tables}};
}

std::string stepwise_csv(const logit::StepwiseResult& r) {
  std::ostringstream out;
  out << "step,move,variable,aic,n_variables\n";
  for (std::size_t i = 0; i < r.trace.size(); ++i)
    out << i << ',' << r.trace[i].move << ',' << r.trace[i].variable << ',' << format_number(r.trace[i].aic) << ','
        << r.trace[i].variables.size() << '\n';
  return out.str();
}

std::string nb_wrapper_csv(const nb::WrapperResult& r) {
  std::ostringstream out;
  out << "variable,learning_score,validation_score,accepted\n";
  for (const auto& s : r.trace)
    out << s.variable << ',' << format_number(s.learning_score) << ',' << format_number(s.validation_score)
        << ",1\n";
  if (!r.rejected.empty())
    out << r.rejected << ',' << format_number(r.rejected_learning_score) << ','
        << format_number(r.rejected_validation_score) << ",0\n";
  return out.str();
}

std::string rf_wrapper_csv(const rf::RfWrapperResult& r) {
  std::ostringstream out;
  out << "k,mean_accuracy,chosen\n";
  for (const auto& s : r.trace)
    out << s.k << ',' << format_number(s.mean_accuracy) << ',' << (s.k == r.variables.size() ? 1 : 0) << '\n';
  return out.str();
}

std::string importance_csv(const std::vector<rf::ImportanceEntry>& ranked) {
  std::ostringstream out;
  out << "variable,mean_decrease_gini\n";
  for (const auto& e : ranked) out << e.variable << ',' << format_number(e.mean_decrease_gini) << '\n';
  return out.str();
}

}  // namespace periop::io

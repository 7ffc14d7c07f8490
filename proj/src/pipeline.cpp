#include "periop/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <thread>

#include "periop/stats.hpp"
#include "periop/synthgen.hpp"

namespace periop::pipeline {

using io::Json;

std::string to_string(ModelKind m) {
  switch (m) {
    case ModelKind::Logit: return "logit";
    case ModelKind::WLogit: return "wlogit";
    case ModelKind::NbKde: return "nbkde";
    case ModelKind::Forest: return "forest";
  }
  return "?";
}

std::string to_string(SelectionMode s) {
  switch (s) {
    case SelectionMode::All: return "all";
    case SelectionMode::Filter: return "filter";
    case SelectionMode::Wrapper: return "wrapper";
  }
  return "?";
}

ModelKind model_from_string(const std::string& s) {
  for (auto m : {ModelKind::Logit, ModelKind::WLogit, ModelKind::NbKde, ModelKind::Forest})
    if (to_string(m) == s) return m;
  fail(ErrorCode::InvalidConfig, "unknown model '" + s + "'");
}

SelectionMode selection_from_string(const std::string& s) {
  for (auto m : {SelectionMode::All, SelectionMode::Filter, SelectionMode::Wrapper})
    if (to_string(m) == s) return m;
  fail(ErrorCode::InvalidConfig, "unknown selection mode '" + s + "'");
}

namespace {

std::string direction_name(logit::Direction d) {
  switch (d) {
    case logit::Direction::Forward: return "forward";
    case logit::Direction::Backward: return "backward";
    case logit::Direction::Both: return "both";
  }
  return "?";
}

logit::Direction direction_from(const std::string& s) {
  if (s == "forward") return logit::Direction::Forward;
  if (s == "backward") return logit::Direction::Backward;
  if (s == "both") return logit::Direction::Both;
  fail(ErrorCode::InvalidConfig, "unknown stepwise direction '" + s + "'");
}

std::size_t worker_count(std::size_t w) { return w ? w : std::max(1u, std::thread::hardware_concurrency()); }

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) fail(ErrorCode::InvalidConfig, where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) fail(ErrorCode::InvalidConfig, "unknown key '" + key + "' in " + where);
  }
}

Json bins_json(const std::optional<BinsByCutpoints>& b) {
  if (!b) return Json();
  return Json{{"cutpoints", b->cutpoints}, {"labels", b->labels}};
}

std::optional<BinsByCutpoints> bins_from(const Json& j) {
  if (j.is_null()) return std::nullopt;
  BinsByCutpoints b{j.at("cutpoints").get<std::vector<double>>(), j.at("labels").get<std::vector<std::string>>()};
  b.validate();
  return b;
}

}  // namespace

void validate(const RunConfig& cfg) {
  const int sources = (cfg.data ? 1 : 0) + (cfg.input.empty() ? 0 : 1) + (cfg.preset.empty() ? 0 : 1);
  if (sources != 1) fail(ErrorCode::InvalidConfig, "give exactly one of: input CSV, preset, in-memory data");
  if (!cfg.input.empty() && cfg.schema.empty()) fail(ErrorCode::InvalidConfig, "an input CSV needs a schema");
  if (cfg.models.empty()) fail(ErrorCode::InvalidConfig, "model list is empty");
  if (cfg.selections.empty()) fail(ErrorCode::InvalidConfig, "selection list is empty");
  if (cfg.forest.n_trees < 1 || cfg.forest.min_node_size < 1)
    fail(ErrorCode::InvalidConfig, "forest needs n_trees >= 1 and min_node_size >= 1");
  if (cfg.rf_wrapper.folds < 2) fail(ErrorCode::InvalidConfig, "cross-validation needs at least two folds");
  if (cfg.rf_wrapper.sizes.empty()) fail(ErrorCode::InvalidConfig, "forest wrapper needs subset sizes");
}

RunConfig config_from_json(const Json& j) {
  try {
    check_keys(j,
               {"input", "schema", "preset", "seed", "outcome", "split", "models", "selections", "candidates",
                "preprocess", "encode", "paper_faithful", "stepwise", "forest", "rf_wrapper", "nb", "eda",
                "workers"},
               "config");
    RunConfig c;
    c.input = j.value("input", std::string());
    c.schema = j.value("schema", std::string());
    c.preset = j.value("preset", std::string());
    c.seed = j.value("seed", std::uint64_t{0});
    c.outcome = j.value("outcome", std::string());
    if (j.contains("split")) {
      const auto& s = j.at("split");
      check_keys(s, {"column", "cutoff", "train_rows"}, "split");
      if (s.contains("train_rows")) c.split = IndexSplit{s.at("train_rows").get<std::vector<std::size_t>>()};
      else c.split = ThresholdSplit{s.at("column").get<std::string>(), s.at("cutoff").get<double>()};
    }
    if (j.contains("models")) {
      c.models.clear();
      for (const auto& m : j.at("models")) c.models.push_back(model_from_string(m.get<std::string>()));
    }
    if (j.contains("selections")) {
      c.selections.clear();
      for (const auto& m : j.at("selections")) c.selections.push_back(selection_from_string(m.get<std::string>()));
    }
    c.candidates = j.value("candidates", std::vector<std::string>{});
    c.preprocess = j.value("preprocess", std::string());
    c.encode = j.value("encode", false);
    c.paper_faithful = j.value("paper_faithful", false);
    if (j.contains("stepwise")) {
      const auto& s = j.at("stepwise");
      check_keys(s, {"logit_direction", "wlogit_direction", "aic_mode"}, "stepwise");
      c.logit_direction = direction_from(s.value("logit_direction", std::string("backward")));
      c.wlogit_direction = direction_from(s.value("wlogit_direction", std::string("backward")));
      const std::string aic = s.value("aic_mode", std::string("direct"));
      if (aic == "direct") c.aic_mode = logit::AicMode::Direct;
      else if (aic == "rescaled") c.aic_mode = logit::AicMode::Rescaled;
      else fail(ErrorCode::InvalidConfig, "unknown aic_mode '" + aic + "'");
    }
    if (j.contains("forest")) {
      const auto& f = j.at("forest");
      check_keys(f, {"n_trees", "mtry", "min_node_size", "stratified", "aggregation"}, "forest");
      c.forest.n_trees = f.value("n_trees", c.forest.n_trees);
      c.forest.mtry = f.value("mtry", c.forest.mtry);
      c.forest.min_node_size = f.value("min_node_size", c.forest.min_node_size);
      c.forest.stratified = f.value("stratified", c.forest.stratified);
      const std::string agg = f.value("aggregation", std::string("vote"));
      if (agg == "vote") c.forest.aggregation = rf::Aggregation::VoteShare;
      else if (agg == "mean") c.forest.aggregation = rf::Aggregation::MeanLeaf;
      else fail(ErrorCode::InvalidConfig, "unknown aggregation '" + agg + "'");
    }
    if (j.contains("rf_wrapper")) {
      const auto& r = j.at("rf_wrapper");
      check_keys(r, {"sizes", "folds", "threshold"}, "rf_wrapper");
      c.rf_wrapper.sizes = r.value("sizes", c.rf_wrapper.sizes);
      c.rf_wrapper.folds = r.value("folds", c.rf_wrapper.folds);
      c.rf_wrapper.threshold = r.value("threshold", c.rf_wrapper.threshold);
    }
    if (j.contains("nb")) {
      const auto& n = j.at("nb");
      check_keys(n, {"prior"}, "nb");
      const std::string prior = n.value("prior", std::string("empirical"));
      if (prior == "empirical") c.nb_prior = nb::PriorMode::Empirical;
      else if (prior == "equal") c.nb_prior = nb::PriorMode::Equal;
      else fail(ErrorCode::InvalidConfig, "unknown prior '" + prior + "'");
    }
    if (j.contains("eda")) {
      const auto& e = j.at("eda");
      check_keys(e, {"enabled", "interactions"}, "eda");
      c.eda = e.value("enabled", true);
      if (e.contains("interactions"))
        for (const auto& i : e.at("interactions")) {
          check_keys(i, {"a", "b", "bins_a", "bins_b"}, "interaction");
          c.interactions.push_back({i.at("a").get<std::string>(), i.at("b").get<std::string>(),
                                    bins_from(i.value("bins_a", Json())), bins_from(i.value("bins_b", Json()))});
        }
    }
    c.workers = j.value("workers", std::size_t{0});
    return c;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidConfig, std::string("invalid config: ") + e.what());
  }
}

Json to_json(const RunConfig& c) {
  Json split;
  if (const auto* t = std::get_if<ThresholdSplit>(&c.split)) split = Json{{"column", t->column}, {"cutoff", t->cutoff}};
  else split = Json{{"train_rows", std::get<IndexSplit>(c.split).train_rows}};
  Json models = Json::array(), sels = Json::array(), inter = Json::array();
  for (auto m : c.models) models.push_back(to_string(m));
  for (auto s : c.selections) sels.push_back(to_string(s));
  for (const auto& i : c.interactions)
    inter.push_back(Json{{"a", i.a}, {"b", i.b}, {"bins_a", bins_json(i.bins_a)}, {"bins_b", bins_json(i.bins_b)}});
  Json out{{"input", c.data ? std::string("<memory>") : c.input},
           {"schema", c.schema},
           {"preset", c.preset},
           {"seed", c.seed},
           {"outcome", c.outcome},
           {"split", split},
           {"models", models},
           {"selections", sels},
           {"candidates", c.candidates},
           {"preprocess", c.preprocess},
           {"encode", c.encode},
           {"paper_faithful", c.paper_faithful},
           {"stepwise",
            {{"logit_direction", direction_name(c.logit_direction)},
             {"wlogit_direction", direction_name(c.wlogit_direction)},
             {"aic_mode", c.aic_mode == logit::AicMode::Direct ? "direct" : "rescaled"}}},
           {"forest",
            {{"n_trees", c.forest.n_trees},
             {"mtry", c.forest.mtry},
             {"min_node_size", c.forest.min_node_size},
             {"stratified", c.forest.stratified},
             {"aggregation", c.forest.aggregation == rf::Aggregation::VoteShare ? "vote" : "mean"}}},
           {"rf_wrapper",
            {{"sizes", c.rf_wrapper.sizes}, {"folds", c.rf_wrapper.folds}, {"threshold", c.rf_wrapper.threshold}}},
           {"nb", {{"prior", c.nb_prior == nb::PriorMode::Empirical ? "empirical" : "equal"}}},
           {"eda", {{"enabled", c.eda}, {"interactions", inter}}}};
  return out;
}

// ---------------------------------------------------------------------------
// Models

Probabilities predict_model(const FittedModel& model, const Dataset& ds) {
  if (const auto* f = std::get_if<logit::LogitFit>(&model)) return logit::predict(*f, logit::build_design(ds, f->layout));
  if (const auto* m = std::get_if<nb::NbModel>(&model)) {
    nb::NbModel local = *m;
    for (std::size_t p = 0; p < local.variables.size(); ++p)
      local.var_indices[p] = ds.schema().require_index(local.variables[p]);
    return nb::predict_nb(local, ds);
  }
  return rf::predict_forest(std::get<rf::Forest>(model), ds);
}

Json model_to_json(const FittedModel& model) {
  return std::visit([](const auto& m) { return io::to_json(m); }, model);
}

FittedModel model_from_json(const Json& j, const Schema& schema) {
  const std::string type = j.value("type", std::string());
  if (type == "logit") return io::logit_from_json(j, schema);
  if (type == "nbkde") return io::nb_from_json(j, schema);
  if (type == "forest") return io::forest_from_json(j);
  fail(ErrorCode::InvalidConfig, "unknown model type '" + type + "'");
}

// ---------------------------------------------------------------------------
// Stages

Prepared prepare(const RunConfig& cfg) {
  validate(cfg);
  Prepared p;
  if (cfg.data) {
    p.full = *cfg.data;
  } else if (!cfg.preset.empty()) {
    p.cohort_spec = synth::preset(cfg.preset, cfg.seed);
    p.cohort = synth::generate(*p.cohort_spec);
    p.full = p.cohort->data;
  } else {
    p.full = load_csv(cfg.input, io::schema_from_json(io::read_json(cfg.schema)));
  }
  const Schema& schema = p.full.schema();
  if (schema.outcomes().empty()) fail(ErrorCode::InvalidSchema, "schema declares no outcome");
  p.outcome = cfg.outcome.empty() ? schema.outcomes().front() : cfg.outcome;
  if (!schema.outcome_index(p.outcome)) fail(ErrorCode::UnknownOutcome, "unknown outcome '" + p.outcome + "'");
  p.candidates = cfg.candidates.empty() ? schema.variable_names() : cfg.candidates;
  for (const auto& c : p.candidates) schema.require_index(c);

  std::string pre = cfg.preprocess;
  if (pre.empty()) pre = cfg.preset == "eras-like" ? "eras-mst" : "none";
  Dataset data = p.full;
  std::optional<ImputationPlan> plan;
  if (pre != "none") {
    const PreprocessPreset preset = preprocess_preset(pre);
    if (cfg.encode) data = apply_encodings(data, preset.encodings);
    plan = preset.imputation;
  }

  if (plan && cfg.paper_faithful) {
    p.imputer = fit_imputer(data, *plan);
    p.split = temporal_split(apply_imputer(data, *p.imputer), cfg.split);
  } else {
    p.split = temporal_split(data, cfg.split);
    if (plan) {
      p.imputer = fit_imputer(p.split.train, *plan);
      p.split.train = apply_imputer(p.split.train, *p.imputer);
      p.split.test = apply_imputer(p.split.test, *p.imputer);
    }
  }
  for (const auto& c : p.candidates) {
    const std::size_t idx = schema.require_index(c);
    const std::size_t m = p.split.train.missing_count(idx) + p.split.test.missing_count(idx);
    if (m > 0) p.warnings.push_back("'" + c + "' still has " + std::to_string(m) + " missing cells");
  }
  return p;
}

EdaResult run_eda(const RunConfig& cfg, const Prepared& p) {
  EdaResult out;
  if (!cfg.eda) return out;
  std::vector<std::vector<eda::LogitPoint>> curves(p.candidates.size());
  parallel_for(p.candidates.size(), worker_count(cfg.workers), [&](std::size_t i) {
    curves[i] = eda::marginal_logit_curve(p.split.train, p.candidates[i], p.outcome);
  });
  for (std::size_t i = 0; i < curves.size(); ++i) out.curves[p.candidates[i]] = std::move(curves[i]);
  std::vector<InteractionSpec> inter = cfg.interactions;
  const Schema& s = p.split.train.schema();
  if (inter.empty() && s.index_of("BMI") && s.index_of("procedure"))
    inter.push_back({"BMI", "procedure", bmi_categories(), std::nullopt});
  for (const auto& i : inter)
    out.grids.push_back(eda::interaction_grid(p.split.train, i.a, i.b, p.outcome, i.bins_a, i.bins_b));
  return out;
}

const SelectionRecord* Selections::find(SelectionMode mode, ModelKind model) const {
  for (const auto& r : records)
    if (r.mode == mode && (mode != SelectionMode::Wrapper || r.model == model)) return &r;
  return nullptr;
}

namespace {

logit::FitOptions fit_options(const RunConfig& cfg) {
  logit::FitOptions o;
  o.aic_mode = cfg.aic_mode;
  return o;
}

rf::ForestConfig forest_config(const RunConfig& cfg) {
  rf::ForestConfig f = cfg.forest;
  f.seed = cfg.seed;
  f.workers = cfg.workers;
  return f;
}

template <typename F>
void record_errors(SelectionRecord& rec, F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    rec.error = e.what();
    rec.error_code = std::string(periop::to_string(e.code()));
  }
}

}  // namespace

Selections select_variables(const RunConfig& cfg, const Prepared& p) {
  Selections out;
  const Dataset& train = p.split.train;
  auto wants = [&](SelectionMode m) {
    return std::find(cfg.selections.begin(), cfg.selections.end(), m) != cfg.selections.end();
  };
  if (wants(SelectionMode::All)) {
    SelectionRecord rec;
    rec.variables = p.candidates;
    out.records.push_back(std::move(rec));
  }
  if (wants(SelectionMode::Filter)) {
    SelectionRecord rec;
    rec.mode = SelectionMode::Filter;
    record_errors(rec, [&] {
      const auto r = info::hybrid_filter_select(train, p.outcome, p.candidates);
      rec.variables = r.variables;
      rec.trace = io::to_json(r);
      rec.csv["filter_cmi.csv"] = info::hybrid_trace_csv(r);
    });
    out.records.push_back(std::move(rec));
  }
  if (wants(SelectionMode::Wrapper)) {
    for (ModelKind m : cfg.models) {
      SelectionRecord rec;
      rec.mode = SelectionMode::Wrapper;
      rec.model = m;
      record_errors(rec, [&] {
        switch (m) {
          case ModelKind::Logit:
          case ModelKind::WLogit: {
            const bool weighted = m == ModelKind::WLogit;
            const auto w = weighted ? logit::balanced_weights(train.outcome(p.outcome)) : logit::ClassWeights::unit();
            const auto r = logit::stepwise_select(train, p.outcome, p.candidates,
                                                  weighted ? cfg.wlogit_direction : cfg.logit_direction, w,
                                                  fit_options(cfg));
            rec.variables = r.variables;
            rec.trace = io::to_json(r);
            rec.csv["stepwise_" + to_string(m) + ".csv"] = io::stepwise_csv(r);
            break;
          }
          case ModelKind::NbKde: {
            const auto r = nb::nb_wrapper_select(train, p.outcome, p.candidates, {0.75, cfg.nb_prior, cfg.seed});
            rec.variables = r.variables;
            rec.trace = io::to_json(r);
            rec.csv["nb_wrapper.csv"] = io::nb_wrapper_csv(r);
            break;
          }
          case ModelKind::Forest: {
            rf::RfWrapperOptions opts = cfg.rf_wrapper;
            for (auto& k : opts.sizes) k = std::min(k, p.candidates.size());
            const auto r = rf::rf_wrapper_select(train, p.outcome, p.candidates, forest_config(cfg), opts);
            rec.variables = r.variables;
            rec.trace = io::to_json(r);
            rec.csv["rf_wrapper.csv"] = io::rf_wrapper_csv(r);
            rec.csv["rf_importance.csv"] = io::importance_csv(r.ranking);
            break;
          }
        }
      });
      out.records.push_back(std::move(rec));
    }
  }
  return out;
}

FittedModel fit_model(const RunConfig& cfg, ModelKind kind, const Dataset& train, const std::string& outcome,
                      const std::vector<std::string>& vars) {
  const auto y = train.outcome(outcome);
  switch (kind) {
    case ModelKind::Logit:
      return logit::fit(logit::build_design(train, vars), y, logit::ClassWeights::unit(), fit_options(cfg));
    case ModelKind::WLogit:
      return logit::fit(logit::build_design(train, vars), y, logit::balanced_weights(y), fit_options(cfg));
    case ModelKind::NbKde:
      return nb::fit_nb(train, vars, outcome, cfg.nb_prior);
    case ModelKind::Forest:
      return rf::fit_forest(train, vars, outcome, forest_config(cfg));
  }
  fail(ErrorCode::InvalidConfig, "unknown model");
}

RunReport run(const RunConfig& cfg) {
  using Clock = std::chrono::steady_clock;
  auto seconds = [](Clock::time_point a) { return std::chrono::duration<double>(Clock::now() - a).count(); };
  RunReport report;
  report.config = to_json(cfg);

  auto t = Clock::now();
  const Prepared p = prepare(cfg);
  report.timing_seconds["prepare"] = seconds(t);
  report.warnings = p.warnings;

  const auto train_counts = class_counts(p.split.train, p.outcome);
  const auto test_counts = class_counts(p.split.test, p.outcome);
  Json missing = Json::object();
  for (const auto& c : p.candidates) {
    const std::size_t m = p.full.missing_count(p.full.schema().require_index(c));
    if (m) missing[c] = m;
  }
  report.data_summary = Json{
      {"outcome", p.outcome},
      {"n_rows", p.full.n_rows()},
      {"train", {{"n", p.split.train.n_rows()}, {"n0", train_counts.n0}, {"n1", train_counts.n1}}},
      {"test", {{"n", p.split.test.n_rows()}, {"n0", test_counts.n0}, {"n1", test_counts.n1}}},
      {"candidates", p.candidates.size()},
      {"missing_before_imputation", missing},
      {"imputation", !p.imputer ? "none" : cfg.paper_faithful ? "full-data" : "train-only"}};

  t = Clock::now();
  report.eda = run_eda(cfg, p);
  report.timing_seconds["eda"] = seconds(t);

  t = Clock::now();
  report.selections = select_variables(cfg, p);
  report.timing_seconds["select"] = seconds(t);

  for (SelectionMode s : {SelectionMode::All, SelectionMode::Filter, SelectionMode::Wrapper}) {
    if (std::find(cfg.selections.begin(), cfg.selections.end(), s) == cfg.selections.end()) continue;
    for (ModelKind m : cfg.models) report.cells.push_back(CellResult{m, s, {}, {}, {}, {}, {}, {}});
  }

  t = Clock::now();
  parallel_for(report.cells.size(), worker_count(cfg.workers), [&](std::size_t i) {
    CellResult& cell = report.cells[i];
    const SelectionRecord* sel = report.selections.find(cell.selection, cell.model);
    if (!sel || !sel->error.empty()) {
      cell.error = sel ? "selection failed: " + sel->error : "no selection";
      cell.error_code = sel ? sel->error_code : "InvalidConfig";
      return;
    }
    cell.variables = sel->variables;
    try {
      cell.fitted = fit_model(cfg, cell.model, p.split.train, p.outcome, cell.variables);
      cell.in_sample = evaluate(p.split.train.outcome(p.outcome), predict_model(*cell.fitted, p.split.train));
      cell.out_of_sample = evaluate(p.split.test.outcome(p.outcome), predict_model(*cell.fitted, p.split.test));
    } catch (const Error& e) {
      cell.error = e.what();
      cell.error_code = std::string(periop::to_string(e.code()));
    }
  });
  report.timing_seconds["fit_evaluate"] = seconds(t);
  return report;
}

// ---------------------------------------------------------------------------
// Reports

namespace {

Json optional_eval(const std::optional<EvaluationReport>& r) { return r ? io::to_json(*r) : Json(); }

}  // namespace

Json report_json(const RunReport& report) {
  Json sels = Json::array(), cells = Json::array();
  for (const auto& s : report.selections.records)
    sels.push_back(Json{{"mode", to_string(s.mode)},
                        {"model", s.model ? Json(to_string(*s.model)) : Json()},
                        {"variables", s.variables},
                        {"trace", s.trace},
                        {"error", s.error.empty() ? Json() : Json{{"code", s.error_code}, {"message", s.error}}}});
  for (const auto& c : report.cells)
    cells.push_back(Json{{"model", to_string(c.model)},
                         {"selection", to_string(c.selection)},
                         {"variables", c.variables},
                         {"in_sample", optional_eval(c.in_sample)},
                         {"out_of_sample", optional_eval(c.out_of_sample)},
                         {"error", c.error.empty() ? Json() : Json{{"code", c.error_code}, {"message", c.error}}}});
  return Json{{"config", report.config},
              {"data", report.data_summary},
              {"warnings", report.warnings},
              {"selections", sels},
              {"cells", cells}};
}

std::string round2(double x) {
  if (!std::isfinite(x)) return "nan";
  const double r = std::floor(x * 100.0 + 0.5 + 1e-9) / 100.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", r == 0.0 ? 0.0 : r);
  return buf;
}

std::string render_table(const Json& report) {
  std::ostringstream out;
  const auto& data = report.at("data");
  out << "Outcome: " << data.at("outcome").get<std::string>() << "  train n=" << data.at("train").at("n")
      << " (" << data.at("train").at("n0") << "/" << data.at("train").at("n1") << ")  test n="
      << data.at("test").at("n") << " (" << data.at("test").at("n0") << "/" << data.at("test").at("n1") << ")\n\n";

  char line[256];
  std::snprintf(line, sizeof line, "%-10s %-8s %3s | %-22s | %-22s\n", "", "", "", "In-sample", "Out-of-sample");
  out << line;
  std::snprintf(line, sizeof line, "%-10s %-8s %3s | %6s %7s %7s | %6s %7s %7s\n", "Selection", "Model", "k", "AUC",
                "Brier0", "Brier1", "AUC", "Brier0", "Brier1");
  out << line << std::string(70, '-') << '\n';

  const std::pair<const char*, const char*> blocks[] = {{"all", "All"}, {"filter", "Filtering"}, {"wrapper", "Wrapper"}};
  for (const auto& [mode, title] : blocks) {
    bool first = true;
    for (const auto& c : report.at("cells")) {
      if (c.at("selection").get<std::string>() != mode) continue;
      const std::string model = c.at("model").get<std::string>();
      const std::string k = std::to_string(c.at("variables").size());
      if (!c.at("error").is_null()) {
        std::snprintf(line, sizeof line, "%-10s %-8s %3s | error: %s\n", first ? title : "", model.c_str(), "-",
                      c.at("error").at("code").get<std::string>().c_str());
      } else {
        const auto& in = c.at("in_sample");
        const auto& oos = c.at("out_of_sample");
        auto f = [](const Json& e, const char* key) { return round2(e.at(key).get<double>()); };
        std::snprintf(line, sizeof line, "%-10s %-8s %3s | %6s %7s %7s | %6s %7s %7s\n", first ? title : "",
                      model.c_str(), k.c_str(), f(in, "auc").c_str(), f(in, "brier0").c_str(),
                      f(in, "brier1").c_str(), f(oos, "auc").c_str(), f(oos, "brier0").c_str(),
                      f(oos, "brier1").c_str());
      }
      out << line;
      first = false;
    }
  }
  for (const auto& w : report.at("warnings")) out << "warning: " << w.get<std::string>() << '\n';
  return out.str();
}

std::string render_table(const RunReport& report) { return render_table(report_json(report)); }

namespace {

std::string file_safe(const std::string& name) {
  std::string out;
  for (char c : name) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  return out;
}

}  // namespace

void write_outputs(const RunReport& report, const std::filesystem::path& dir) {
  const Json body = report_json(report);
  io::write_text(dir / "report.json", io::dump(body));
  io::write_text(dir / "report.txt", render_table(body));
  Json timing = Json::object();
  for (const auto& [k, v] : report.timing_seconds) timing[k] = v;
  io::write_text(dir / "timing.json", io::dump(timing));
  for (const auto& s : report.selections.records)
    for (const auto& [name, text] : s.csv) io::write_text(dir / "selection" / name, text);
  for (const auto& [var, curve] : report.eda.curves)
    io::write_text(dir / "eda" / ("logit_" + file_safe(var) + ".csv"), eda::curve_csv(curve));
  for (const auto& g : report.eda.grids) {
    std::string text = eda::grid_csv(g);
    for (const auto& w : g.warnings) text += "# warning: " + w + "\n";
    io::write_text(dir / "eda" / ("interaction_" + file_safe(g.var_a) + "_x_" + file_safe(g.var_b) + ".csv"), text);
  }
  std::ostringstream metrics;
  metrics << "model,selection,k,in_auc,in_brier0,in_brier1,out_auc,out_brier0,out_brier1,error\n";
  for (const auto& c : report.cells) {
    metrics << to_string(c.model) << ',' << to_string(c.selection) << ',' << c.variables.size();
    for (const auto* e : {&c.in_sample, &c.out_of_sample}) {
      if (*e)
        metrics << ',' << format_number((*e)->auc) << ',' << format_number((*e)->brier0) << ','
                << format_number((*e)->brier1);
      else
        metrics << ",,,";
    }
    metrics << ',' << c.error_code << '\n';
    if (c.fitted)
      io::write_text(dir / "models" / (to_string(c.model) + "_" + to_string(c.selection) + ".json"),
                     io::dump(model_to_json(*c.fitted)));
  }
  io::write_text(dir / "metrics.csv", metrics.str());
}

}  // namespace periop::pipeline

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "periop/data.hpp"
#include "periop/eda.hpp"
#include "periop/forest.hpp"
#include "periop/infosel.hpp"
#include "periop/logit.hpp"
#include "periop/metrics.hpp"
#include "periop/nbkde.hpp"
#include "periop/preprocess.hpp"
#include "periop/serialize.hpp"

namespace periop::pipeline {

enum class ModelKind { Logit, WLogit, NbKde, Forest };
enum class SelectionMode { All, Filter, Wrapper };

std::string to_string(ModelKind m);
std::string to_string(SelectionMode s);
ModelKind model_from_string(const std::string& s);
SelectionMode selection_from_string(const std::string& s);

struct InteractionSpec {
  std::string a;
  std::string b;
  std::optional<BinsByCutpoints> bins_a;
  std::optional<BinsByCutpoints> bins_b;
};

struct RunConfig {
  // Data source: an in-memory dataset, a CSV plus schema JSON, or a preset.
  std::optional<Dataset> data;
  std::string input;
  std::string schema;
  std::string preset;
  std::uint64_t seed = 0;

  std::string outcome;  // empty: first outcome of the schema
  SplitSpec split = ThresholdSplit{"year", 2023.0};
  std::vector<ModelKind> models{ModelKind::Logit, ModelKind::WLogit, ModelKind::NbKde, ModelKind::Forest};
  std::vector<SelectionMode> selections{SelectionMode::All, SelectionMode::Filter, SelectionMode::Wrapper};
  std::vector<std::string> candidates;  // empty: every schema variable

  std::string preprocess;  // preprocessing preset; "none" disables it
  bool encode = false;     // apply the preset's raw-export encodings first
  bool paper_faithful = false;

  logit::Direction logit_direction = logit::Direction::Backward;
  logit::Direction wlogit_direction = logit::Direction::Backward;
  logit::AicMode aic_mode = logit::AicMode::Direct;
  rf::ForestConfig forest;
  rf::RfWrapperOptions rf_wrapper;
  nb::PriorMode nb_prior = nb::PriorMode::Empirical;

  bool eda = true;
  std::vector<InteractionSpec> interactions;
  std::size_t workers = 0;  // 0: hardware concurrency
};

// Exactly one data source, non-empty model and selection lists.
void validate(const RunConfig& cfg);
RunConfig config_from_json(const io::Json& j);
io::Json to_json(const RunConfig& cfg);

using FittedModel = std::variant<logit::LogitFit, nb::NbModel, rf::Forest>;
Probabilities predict_model(const FittedModel& model, const Dataset& ds);
io::Json model_to_json(const FittedModel& model);
FittedModel model_from_json(const io::Json& j, const Schema& schema);

// Data after loading, splitting and imputation.
struct Prepared {
  Dataset full;  // as loaded (pre-imputation)
  Partition split;
  std::string outcome;
  std::vector<std::string> candidates;
  std::optional<FittedImputer> imputer;
  std::vector<std::string> warnings;
  std::optional<synth::GeneratedCohort> cohort;  // preset runs only
  std::optional<synth::CohortSpec> cohort_spec;
};

Prepared prepare(const RunConfig& cfg);

struct EdaResult {
  std::map<std::string, std::vector<eda::LogitPoint>> curves;
  std::vector<eda::InteractionGrid> grids;
};
EdaResult run_eda(const RunConfig& cfg, const Prepared& p);

struct SelectionRecord {
  SelectionMode mode = SelectionMode::All;
  std::optional<ModelKind> model;  // wrappers only
  std::vector<std::string> variables;
  io::Json trace;
  std::map<std::string, std::string> csv;  // file name -> content
  std::string error;
  std::string error_code;
};

struct Selections {
  std::vector<SelectionRecord> records;
  const SelectionRecord* find(SelectionMode mode, ModelKind model) const;
};

// Runs only on the train partition.
Selections select_variables(const RunConfig& cfg, const Prepared& p);

FittedModel fit_model(const RunConfig& cfg, ModelKind kind, const Dataset& train, const std::string& outcome,
                      const std::vector<std::string>& vars);

struct CellResult {
  ModelKind model = ModelKind::Logit;
  SelectionMode selection = SelectionMode::All;
  std::vector<std::string> variables;
  std::optional<EvaluationReport> in_sample;
  std::optional<EvaluationReport> out_of_sample;
  std::optional<FittedModel> fitted;
  std::string error;
  std::string error_code;
};

struct RunReport {
  io::Json config;
  io::Json data_summary;
  Selections selections;
  std::vector<CellResult> cells;
  std::vector<std::string> warnings;
  EdaResult eda;
  std::map<std::string, double> timing_seconds;
};

RunReport run(const RunConfig& cfg);

// Deterministic report body (no timing, no fitted models).
io::Json report_json(const RunReport& report);
// Aligned text table grouped into All / Filtering / Wrapper blocks.
std::string render_table(const RunReport& report);
std::string render_table(const io::Json& report);

// Half-up to two decimals.
std::string round2(double x);

// report.json, report.txt, timing.json, selection and EDA CSVs, models/.
void write_outputs(const RunReport& report, const std::filesystem::path& dir);

}  // namespace periop::pipeline

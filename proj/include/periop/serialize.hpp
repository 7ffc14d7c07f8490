#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "periop/data.hpp"
#include "periop/forest.hpp"
#include "periop/infosel.hpp"
#include "periop/logit.hpp"
#include "periop/metrics.hpp"
#include "periop/nbkde.hpp"
#include "periop/preprocess.hpp"
#include "periop/synthgen.hpp"

namespace periop::io {

// Insertion-ordered so dumps are stable and read in declaration order.
using Json = nlohmann::ordered_json;

// Two-space indent, trailing newline.
std::string dump(const Json& j);
Json parse_json(const std::string& text);
Json read_json(const std::filesystem::path& path);
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

// {"variables": [{"name", "kind", "levels"}], "outcomes": [...], "metadata": [...]}
Json to_json(const Schema& schema);
Schema schema_from_json(const Json& j);

Json to_json(const synth::CohortSpec& spec);
synth::CohortSpec cohort_spec_from_json(const Json& j);
// Spec, per-outcome intercepts and ground-truth probabilities.
Json truth_json(const synth::CohortSpec& spec, const synth::GeneratedCohort& cohort);

Json to_json(const EvaluationReport& r);

Json to_json(const logit::LogitFit& fit);
// Layout is rebuilt from `schema`; stored column names must match.
logit::LogitFit logit_from_json(const Json& j, const Schema& schema);

Json to_json(const nb::NbModel& model);
nb::NbModel nb_from_json(const Json& j, const Schema& schema);

Json to_json(const rf::Forest& forest);
rf::Forest forest_from_json(const Json& j);

Json to_json(const logit::StepwiseResult& r);
Json to_json(const nb::WrapperResult& r);
Json to_json(const rf::RfWrapperResult& r);
Json to_json(const info::HybridResult& r);

Json to_json(const FittedImputer& imputer);

// CSV views of selection traces.
std::string stepwise_csv(const logit::StepwiseResult& r);
std::string nb_wrapper_csv(const nb::WrapperResult& r);
std::string rf_wrapper_csv(const rf::RfWrapperResult& r);
std::string importance_csv(const std::vector<rf::ImportanceEntry>& ranked);

}  // namespace periop::io

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "periop/data.hpp"

namespace periop::info {

// Discrete codes (level indices), one per row.
using Codes = std::vector<std::size_t>;

// Plug-in estimates in nats; 0 * log 0 = 0.
double mutual_information(std::span<const std::size_t> x, std::span<const std::size_t> y);
double conditional_mutual_information(std::span<const std::size_t> x, std::span<const std::size_t> y,
                                      const std::vector<Codes>& z);

// Continuous columns binned at the 10/30/50/70/90% quantiles (right-closed,
// duplicate cutpoints dropped) into ordinal columns; discrete columns copied.
Dataset discretize_for_info(const Dataset& ds, const std::vector<std::string>& vars);

// Position of the point farthest from the chord joining the first and last
// points; 0 when every distance is zero up to rounding.
std::size_t elbow_index(std::span<const double> values);

struct RankedValue {
  std::string variable;
  double cmi = 0.0;
};

struct ElbowResult {
  std::vector<RankedValue> ranked;  // descending
  std::size_t elbow_index = 0;      // inclusive
};

struct HeadStep {
  std::string variable;
  double score = 0.0;  // MI for the first pick, CMI for the next two
};

struct HybridResult {
  std::vector<std::string> variables;  // head triple, then the tail up to the elbow
  std::vector<HeadStep> head;
  ElbowResult tail;
};

HybridResult hybrid_filter_select(const Dataset& ds, const std::string& outcome,
                                  const std::vector<std::string>& candidates);

// variable,stage,score,selected,elbow
std::string hybrid_trace_csv(const HybridResult& result);

}  // namespace periop::info

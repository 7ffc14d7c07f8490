#pragma once

#include <optional>
#include <string>
#include <vector>

#include "periop/data.hpp"
#include "periop/preprocess.hpp"

namespace periop::eda {

struct EmpiricalLogit {
  double logit = 0.0;
  double lo90 = 0.0;
  double hi90 = 0.0;
};

// ln((n1 + .5) / (n0 + .5)) with a 90% Wald band on the adjusted counts.
EmpiricalLogit empirical_logit(std::size_t n1, std::size_t n0);

struct LogitPoint {
  std::string label;
  double x = 0.0;  // bin midpoint, or level index for discrete columns
  double logit = 0.0;
  double lo90 = 0.0;
  double hi90 = 0.0;
  std::size_t n0 = 0;
  std::size_t n1 = 0;
};

// Continuous columns use right-closed bins at the 10/30/50/70/90% quantiles,
// with the outer bins closed at the observed min and max. Rows with a Missing
// cell are skipped; empty bins produce no point.
std::vector<LogitPoint> marginal_logit_curve(const Dataset& ds, const std::string& var,
                                             const std::string& outcome);

struct GridCell {
  std::size_t a = 0;  // bin or level index along each axis
  std::size_t b = 0;
  std::string label_a;
  std::string label_b;
  LogitPoint point;
};

struct InteractionGrid {
  std::string var_a;
  std::string var_b;
  std::vector<GridCell> cells;        // populated cells, row-major in (a, b)
  std::vector<std::string> warnings;  // one per omitted empty cell
};

// Bins for a continuous axis (left-closed, as in the imputation categories).
// A discrete axis ignores its bins and uses its levels; a continuous axis
// without bins falls back to the quantile grid.
InteractionGrid interaction_grid(const Dataset& ds, const std::string& var_a, const std::string& var_b,
                                 const std::string& outcome,
                                 const std::optional<BinsByCutpoints>& bins_a = std::nullopt,
                                 const std::optional<BinsByCutpoints>& bins_b = std::nullopt);

// bin,midpoint,logit,lo90,hi90,n0,n1,band
std::string curve_csv(const std::vector<LogitPoint>& curve);
// a,b,logit,lo90,hi90,n0,n1,band
std::string grid_csv(const InteractionGrid& grid);

}  // namespace periop::eda

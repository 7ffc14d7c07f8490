#include "periop/eda.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "periop/stats.hpp"

namespace periop::eda {

namespace {
constexpr double kZ90 = 1.645;
constexpr const char* kBand = "wald90";
}  // namespace

EmpiricalLogit empirical_logit(std::size_t n1, std::size_t n0) {
  const double a = static_cast<double>(n1) + 0.5;
  const double b = static_cast<double>(n0) + 0.5;
  const double logit = std::log(a / b);
  const double half = kZ90 * std::sqrt(1.0 / a + 1.0 / b);
  return {logit, logit - half, logit + half};
}

namespace {

LogitPoint make_point(std::string label, double x, std::size_t n0, std::size_t n1) {
  const auto e = empirical_logit(n1, n0);
  return {std::move(label), x, e.logit, e.lo90, e.hi90, n0, n1};
}

// Bin assignment of one axis: index per row (npos for Missing) plus labels
// and representative x per bin.
struct Axis {
  std::vector<std::size_t> bin;
  std::vector<std::string> labels;
  std::vector<double> x;
};

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

std::string interval(double lo, double hi, bool left_closed) {
  return (left_closed ? "[" : "(") + format_number(lo) + "," + format_number(hi) + (left_closed ? ")" : "]");
}

Axis quantile_axis(const Dataset& ds, std::size_t var) {
  const std::vector<double> col = ds.column(var);
  const auto cuts = quantile_cutpoints(col, kQuantileGrid);
  Axis axis;
  axis.bin.assign(col.size(), kNone);
  if (cuts.empty()) return axis;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : col)
    if (!std::isnan(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  for (std::size_t b = 0; b <= cuts.size(); ++b) {
    const double left = b == 0 ? lo : cuts[b - 1];
    const double right = b == cuts.size() ? hi : cuts[b];
    axis.labels.push_back(b == 0 ? "[" + format_number(left) + "," + format_number(right) + "]"
                                 : interval(left, right, false));
    axis.x.push_back(0.5 * (left + right));
  }
  for (std::size_t r = 0; r < col.size(); ++r)
    if (!std::isnan(col[r])) axis.bin[r] = right_closed_bin(cuts, col[r]);
  return axis;
}

Axis cutpoint_axis(const Dataset& ds, std::size_t var, const BinsByCutpoints& bins) {
  bins.validate();
  const std::vector<double> col = ds.column(var);
  Axis axis;
  axis.bin.assign(col.size(), kNone);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : col)
    if (!std::isnan(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  const auto& cuts = bins.cutpoints;
  for (std::size_t b = 0; b <= cuts.size(); ++b) {
    const double left = b == 0 ? std::min(lo, cuts.front()) : cuts[b - 1];
    const double right = b == cuts.size() ? std::max(hi, cuts.back()) : cuts[b];
    axis.labels.push_back(bins.labels[b]);
    axis.x.push_back(0.5 * (left + right));
  }
  for (std::size_t r = 0; r < col.size(); ++r)
    if (!std::isnan(col[r])) axis.bin[r] = bins.bin_of(col[r]);
  return axis;
}

Axis level_axis(const Dataset& ds, std::size_t var) {
  const auto& kind = ds.schema().variable(var).kind;
  Axis axis;
  axis.labels = kind.levels();
  for (std::size_t l = 0; l < kind.cardinality(); ++l) axis.x.push_back(static_cast<double>(l));
  axis.bin.assign(ds.n_rows(), kNone);
  for (std::size_t r = 0; r < ds.n_rows(); ++r)
    if (!ds.at(r, var).is_missing()) axis.bin[r] = ds.at(r, var).level();
  return axis;
}

Axis axis_for(const Dataset& ds, std::size_t var, const std::optional<BinsByCutpoints>& bins) {
  if (!ds.schema().variable(var).kind.is_continuous()) return level_axis(ds, var);
  return bins ? cutpoint_axis(ds, var, *bins) : quantile_axis(ds, var);
}

}  // namespace

std::vector<LogitPoint> marginal_logit_curve(const Dataset& ds, const std::string& var,
                                             const std::string& outcome) {
  const std::size_t idx = ds.schema().require_index(var);
  const auto y = ds.outcome(outcome);
  const Axis axis = axis_for(ds, idx, std::nullopt);
  std::vector<std::size_t> n0(axis.labels.size(), 0), n1(axis.labels.size(), 0);
  for (std::size_t r = 0; r < ds.n_rows(); ++r)
    if (axis.bin[r] != kNone) (y[r] ? n1 : n0)[axis.bin[r]]++;
  std::vector<LogitPoint> out;
  for (std::size_t b = 0; b < axis.labels.size(); ++b)
    if (n0[b] + n1[b] > 0) out.push_back(make_point(axis.labels[b], axis.x[b], n0[b], n1[b]));
  return out;
}

InteractionGrid interaction_grid(const Dataset& ds, const std::string& var_a, const std::string& var_b,
                                 const std::string& outcome, const std::optional<BinsByCutpoints>& bins_a,
                                 const std::optional<BinsByCutpoints>& bins_b) {
  const std::size_t ia = ds.schema().require_index(var_a);
  const std::size_t ib = ds.schema().require_index(var_b);
  const auto y = ds.outcome(outcome);
  const Axis a = axis_for(ds, ia, bins_a);
  const Axis b = axis_for(ds, ib, bins_b);
  const std::size_t na = a.labels.size(), nb = b.labels.size();
  std::vector<std::size_t> n0(na * nb, 0), n1(na * nb, 0);
  for (std::size_t r = 0; r < ds.n_rows(); ++r)
    if (a.bin[r] != kNone && b.bin[r] != kNone) (y[r] ? n1 : n0)[a.bin[r] * nb + b.bin[r]]++;

  InteractionGrid grid{var_a, var_b, {}, {}};
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j) {
      const std::size_t k = i * nb + j;
      if (n0[k] + n1[k] == 0) {
        grid.warnings.push_back("empty cell " + var_a + "=" + a.labels[i] + ", " + var_b + "=" + b.labels[j]);
        continue;
      }
      grid.cells.push_back({i, j, a.labels[i], b.labels[j],
                            make_point(a.labels[i] + "|" + b.labels[j], a.x[i], n0[k], n1[k])});
    }
  return grid;
}

namespace {

std::string quoted(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

void write_tail(std::ostream& out, const LogitPoint& p) {
  out << format_number(p.logit) << ',' << format_number(p.lo90) << ',' << format_number(p.hi90) << ','
      << p.n0 << ',' << p.n1 << ',' << kBand << '\n';
}

}  // namespace

std::string curve_csv(const std::vector<LogitPoint>& curve) {
  std::ostringstream out;
  out << "bin,midpoint,logit,lo90,hi90,n0,n1,band\n";
  for (const auto& p : curve) {
    out << quoted(p.label) << ',' << format_number(p.x) << ',';
    write_tail(out, p);
  }
  return out.str();
}

std::string grid_csv(const InteractionGrid& grid) {
  std::ostringstream out;
  out << quoted(grid.var_a) << ',' << quoted(grid.var_b) << ",logit,lo90,hi90,n0,n1,band\n";
  for (const auto& c : grid.cells) {
    out << quoted(c.label_a) << ',' << quoted(c.label_b) << ',';
    write_tail(out, c.point);
  }
  return out.str();
}

}  // namespace periop::eda

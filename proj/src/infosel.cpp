#include "periop/infosel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "periop/stats.hpp"

namespace periop::info {

double conditional_mutual_information(std::span<const std::size_t> x, std::span<const std::size_t> y,
                                      const std::vector<Codes>& z) {
  const std::size_t n = x.size();
  if (n == 0) fail(ErrorCode::EmptyInput, "information of an empty sample");
  if (y.size() != n) fail(ErrorCode::DimensionMismatch, "columns differ in length");
  for (const auto& col : z)
    if (col.size() != n) fail(ErrorCode::DimensionMismatch, "conditioning column differs in length");

  // Dense code for the conditioning cell of each row.
  std::vector<std::size_t> zkey(n, 0);
  if (!z.empty()) {
    std::map<std::vector<std::size_t>, std::size_t> ids;
    std::vector<std::size_t> key(z.size());
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t k = 0; k < z.size(); ++k) key[k] = z[k][r];
      zkey[r] = ids.try_emplace(key, ids.size()).first->second;
    }
  }

  std::map<std::array<std::size_t, 3>, std::size_t> nxyz;
  std::map<std::array<std::size_t, 2>, std::size_t> nxz, nyz;
  std::map<std::size_t, std::size_t> nz;
  for (std::size_t r = 0; r < n; ++r) {
    nxyz[{zkey[r], x[r], y[r]}]++;
    nxz[{zkey[r], x[r]}]++;
    nyz[{zkey[r], y[r]}]++;
    nz[zkey[r]]++;
  }
  double total = 0.0;
  for (const auto& [cell, c] : nxyz) {
    const double num = static_cast<double>(nz[cell[0]]) * static_cast<double>(c);
    const double den = static_cast<double>(nxz[{cell[0], cell[1]}]) *
                       static_cast<double>(nyz[{cell[0], cell[2]}]);
    total += static_cast<double>(c) * std::log(num / den);
  }
  return total / static_cast<double>(n);
}

double mutual_information(std::span<const std::size_t> x, std::span<const std::size_t> y) {
  return conditional_mutual_information(x, y, {});
}

namespace {

std::string bin_label(const std::vector<double>& cuts, std::size_t b) {
  if (cuts.empty()) return "all";
  if (b == 0) return "<=" + format_number(cuts.front());
  if (b == cuts.size()) return ">" + format_number(cuts.back());
  return "(" + format_number(cuts[b - 1]) + "," + format_number(cuts[b]) + "]";
}

}  // namespace

Dataset discretize_for_info(const Dataset& ds, const std::vector<std::string>& vars) {
  Schema schema = ds.schema();
  std::vector<std::pair<std::size_t, std::vector<double>>> binned;
  for (const auto& name : vars) {
    const std::size_t idx = schema.require_index(name);
    if (!schema.variable(idx).kind.is_continuous()) continue;
    const auto col = ds.column(idx);
    auto cuts = quantile_cutpoints(col, kQuantileGrid);
    // a cutpoint at the column maximum would only open an empty top bin
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : col)
      if (!std::isnan(v)) hi = std::max(hi, v);
    while (!cuts.empty() && cuts.back() >= hi) cuts.pop_back();
    std::vector<std::string> labels;
    for (std::size_t b = 0; b <= cuts.size(); ++b) labels.push_back(bin_label(cuts, b));
    schema = schema.with_kind(idx, VariableKind::ordinal(labels));
    binned.emplace_back(idx, std::move(cuts));
  }
  Dataset out = ds.with_schema(schema);
  for (const auto& [idx, cuts] : binned)
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
      const Cell& c = ds.at(r, idx);
      out.set(r, idx, c.is_missing() ? Cell::missing() : Cell::level(right_closed_bin(cuts, c.number())));
    }
  return out;
}

std::size_t elbow_index(std::span<const double> values) {
  const std::size_t m = values.size();
  if (m < 2) fail(ErrorCode::TooShort, "elbow needs at least two points");
  const double dx = static_cast<double>(m - 1);
  const double dy = values[m - 1] - values[0];
  const double len = std::hypot(dx, dy);
  double scale = std::max({1.0, std::abs(values[0]), std::abs(values[m - 1]), dx});
  std::size_t best = 0;
  double best_d = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double d = std::abs(dx * (values[0] - values[i]) + static_cast<double>(i) * dy) / len;
    if (d > best_d) {
      best_d = d;
      best = i;
    }
  }
  return best_d > 1e-12 * scale ? best : 0;
}

namespace {

Codes codes_of(const Dataset& ds, std::size_t var) {
  if (ds.missing_count(var) > 0)
    fail(ErrorCode::MissingValuePresent, "missing values in '" + ds.schema().variable(var).name + "'");
  Codes out(ds.n_rows());
  for (std::size_t r = 0; r < ds.n_rows(); ++r) out[r] = ds.at(r, var).level();
  return out;
}

// Highest score over the unused candidates; ties keep the lowest position.
std::pair<std::size_t, double> argmax_cmi(const std::vector<Codes>& cols, const Codes& y,
                                          const std::vector<bool>& used, const std::vector<Codes>& z) {
  std::vector<double> score(cols.size(), -1.0);
  parallel_for(cols.size(), std::thread::hardware_concurrency(), [&](std::size_t v) {
    if (!used[v]) score[v] = conditional_mutual_information(cols[v], y, z);
  });
  std::size_t best = cols.size();
  for (std::size_t v = 0; v < cols.size(); ++v)
    if (!used[v] && (best == cols.size() || score[v] > score[best])) best = v;
  return {best, score[best]};
}

}  // namespace

HybridResult hybrid_filter_select(const Dataset& ds, const std::string& outcome,
                                  const std::vector<std::string>& candidates) {
  if (candidates.size() < 4) fail(ErrorCode::InvalidArgument, "hybrid filter needs at least four candidates");
  const Dataset disc = discretize_for_info(ds, candidates);
  std::vector<Codes> cols;
  for (const auto& name : candidates) cols.push_back(codes_of(disc, disc.schema().require_index(name)));
  const auto yspan = ds.outcome(outcome);
  const Codes y(yspan.begin(), yspan.end());

  HybridResult result;
  std::vector<bool> used(cols.size(), false);
  std::vector<Codes> z;
  for (int step = 0; step < 3; ++step) {
    const auto [v, s] = argmax_cmi(cols, y, used, z);
    used[v] = true;
    z.push_back(cols[v]);
    result.head.push_back({candidates[v], s});
    result.variables.push_back(candidates[v]);
  }

  std::vector<std::pair<std::size_t, double>> tail;
  std::vector<double> score(cols.size(), 0.0);
  parallel_for(cols.size(), std::thread::hardware_concurrency(), [&](std::size_t v) {
    if (!used[v]) score[v] = conditional_mutual_information(cols[v], y, z);
  });
  for (std::size_t v = 0; v < cols.size(); ++v)
    if (!used[v]) tail.emplace_back(v, score[v]);
  std::stable_sort(tail.begin(), tail.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

  std::vector<double> values;
  for (const auto& [v, s] : tail) {
    result.tail.ranked.push_back({candidates[v], s});
    values.push_back(s);
  }
  result.tail.elbow_index = values.size() < 2 ? 0 : elbow_index(values);
  for (std::size_t i = 0; i <= result.tail.elbow_index; ++i)
    result.variables.push_back(result.tail.ranked[i].variable);
  return result;
}

std::string hybrid_trace_csv(const HybridResult& result) {
  std::ostringstream out;
  out << "variable,stage,score,selected,elbow\n";
  for (std::size_t i = 0; i < result.head.size(); ++i)
    out << result.head[i].variable << ',' << (i == 0 ? "mi" : "cmi_head") << ','
        << format_number(result.head[i].score) << ",1,0\n";
  for (std::size_t i = 0; i < result.tail.ranked.size(); ++i)
    out << result.tail.ranked[i].variable << ",cmi_tail," << format_number(result.tail.ranked[i].cmi) << ','
        << (i <= result.tail.elbow_index ? 1 : 0) << ',' << (i == result.tail.elbow_index ? 1 : 0) << '\n';
  return out.str();
}

}  // namespace periop::info

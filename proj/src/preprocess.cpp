#include "periop/preprocess.hpp"

#include <algorithm>
#include <set>

namespace periop {

void BinsByCutpoints::validate() const {
  for (std::size_t i = 1; i < cutpoints.size(); ++i)
    if (!(cutpoints[i - 1] < cutpoints[i]))
      fail(ErrorCode::InvalidArgument, "cutpoints must be strictly increasing");
  if (labels.size() != cutpoints.size() + 1)
    fail(ErrorCode::InvalidArgument, "bins need exactly cutpoints + 1 labels");
}

std::size_t BinsByCutpoints::bin_of(double value) const {
  return static_cast<std::size_t>(
      std::upper_bound(cutpoints.begin(), cutpoints.end(), value) - cutpoints.begin());
}

const std::string& Conditioner::column() const {
  if (const auto* name = std::get_if<std::string>(&source)) return *name;
  return std::get<DerivedDiscretization>(source).source;
}

// ---------------------------------------------------------------------------
// Encodings

namespace {

Dataset apply_one(const Dataset& ds, const EncodingRule& rule) {
  const Schema& schema = ds.schema();
  const std::size_t var = schema.require_index(rule.target);
  const VariableKind& kind = schema.variable(var).kind;

  std::vector<std::size_t> remap;  // old level -> new level (discrete rules)
  VariableKind new_kind = kind;
  const BinsByCutpoints* bins = nullptr;

  if (const auto* merge = std::get_if<MergeLevels>(&rule.rule)) {
    if (!kind.is_discrete())
      fail(ErrorCode::InvalidArgument, "MergeLevels needs a discrete target: " + rule.target);
    for (const auto& [from, to] : merge->mapping)
      if (!kind.level_index(from))
        fail(ErrorCode::UnmappedLevel, rule.target + ": mapping names unknown level '" + from + "'");
    std::vector<std::string> new_levels;
    for (const auto& old : kind.levels()) {
      auto it = merge->mapping.find(old);
      if (it == merge->mapping.end())
        fail(ErrorCode::UnmappedLevel, rule.target + ": level '" + old + "' is not mapped");
      auto pos = std::find(new_levels.begin(), new_levels.end(), it->second);
      if (pos == new_levels.end()) {
        remap.push_back(new_levels.size());
        new_levels.push_back(it->second);
      } else {
        remap.push_back(static_cast<std::size_t>(pos - new_levels.begin()));
      }
    }
    if (kind.tag() == KindTag::Binary && new_levels == kind.levels()) new_kind = kind;
    else if (kind.tag() == KindTag::Nominal) new_kind = VariableKind::nominal(new_levels);
    else new_kind = VariableKind::ordinal(new_levels);
  } else if (const auto* bin = std::get_if<Binarize>(&rule.rule)) {
    if (!kind.is_discrete())
      fail(ErrorCode::InvalidArgument, "Binarize needs a discrete target: " + rule.target);
    std::set<std::size_t> positive;
    for (const auto& label : bin->positive_levels) {
      auto idx = kind.level_index(label);
      if (!idx) fail(ErrorCode::UnmappedLevel, rule.target + ": unknown level '" + label + "'");
      positive.insert(*idx);
    }
    for (std::size_t l = 0; l < kind.cardinality(); ++l) remap.push_back(positive.count(l) ? 1 : 0);
    new_kind = VariableKind::binary();
  } else {
    bins = &std::get<BinsByCutpoints>(rule.rule);
    bins->validate();
    if (!kind.is_continuous())
      fail(ErrorCode::InvalidArgument, "BinsByCutpoints needs a continuous target: " + rule.target);
    new_kind = VariableKind::ordinal(bins->labels);
  }

  Dataset out = ds.with_schema(schema.with_kind(var, new_kind));
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    const Cell& cell = ds.at(r, var);
    if (cell.is_missing()) continue;
    if (bins) out.set(r, var, Cell::level(bins->bin_of(cell.number())));
    else out.set(r, var, Cell::level(remap[cell.level()]));
  }
  return out;
}

}  // namespace

Dataset apply_encodings(const Dataset& ds, const std::vector<EncodingRule>& rules) {
  Dataset out = ds;
  for (const auto& rule : rules) out = apply_one(out, rule);
  return out;
}

// ---------------------------------------------------------------------------
// Conditional tables

namespace {

struct ResolvedConditioner {
  std::size_t var;
  const BinsByCutpoints* bins;  // null for a discrete column
};

std::vector<ResolvedConditioner> resolve(const Dataset& ds, std::size_t target,
                                         const std::vector<Conditioner>& conditioners) {
  std::vector<ResolvedConditioner> out;
  for (const auto& c : conditioners) {
    const std::size_t var = ds.schema().require_index(c.column());
    if (var == target)
      fail(ErrorCode::InvalidArgument,
           "imputation target '" + c.column() + "' cannot condition on itself");
    const auto& kind = ds.schema().variable(var).kind;
    if (const auto* d = std::get_if<DerivedDiscretization>(&c.source)) {
      d->scheme.validate();
      if (!kind.is_continuous())
        fail(ErrorCode::InvalidArgument, "derived discretization of non-continuous '" + c.column() + "'");
      out.push_back({var, &d->scheme});
    } else {
      if (!kind.is_discrete())
        fail(ErrorCode::InvalidArgument,
             "conditioner '" + c.column() + "' is continuous; use a derived discretization");
      out.push_back({var, nullptr});
    }
  }
  return out;
}

// Conditioner key for a row; false if any conditioner is Missing.
bool row_key(const Dataset& ds, std::size_t row, const std::vector<ResolvedConditioner>& cs,
             std::vector<std::size_t>& key) {
  key.clear();
  for (const auto& c : cs) {
    const Cell& cell = ds.at(row, c.var);
    if (cell.is_missing()) return false;
    key.push_back(c.bins ? c.bins->bin_of(cell.number()) : cell.level());
  }
  return true;
}

// Lowest level index among the most frequent.
double mode_of(const std::vector<std::size_t>& counts) {
  std::size_t best = 0;
  for (std::size_t l = 1; l < counts.size(); ++l)
    if (counts[l] > counts[best]) best = l;
  return static_cast<double>(best);
}

}  // namespace

ConditionalTable build_conditional_table(const Dataset& ds, const std::string& target,
                                         const std::vector<Conditioner>& conditioners) {
  const std::size_t var = ds.schema().require_index(target);
  const auto& kind = ds.schema().variable(var).kind;
  ConditionalTable table;
  table.target = target;
  table.conditioners = conditioners;
  table.statistic = kind.is_continuous() ? Statistic::ConditionalMean : Statistic::ConditionalMode;
  const auto resolved = resolve(ds, var, conditioners);

  struct Acc {
    double sum = 0.0;
    std::size_t n = 0;
    std::vector<std::size_t> counts;
  };
  std::map<std::vector<std::size_t>, Acc> acc;
  Acc total;
  total.counts.assign(kind.cardinality(), 0);
  std::vector<std::size_t> key;
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    const Cell& cell = ds.at(r, var);
    if (cell.is_missing()) continue;
    const double v = cell.numeric();
    total.sum += v;
    total.n++;
    if (!kind.is_continuous()) total.counts[cell.level()]++;
    if (!row_key(ds, r, resolved, key)) continue;
    Acc& a = acc[key];
    if (a.counts.empty()) a.counts.assign(kind.cardinality(), 0);
    a.sum += v;
    a.n++;
    if (!kind.is_continuous()) a.counts[cell.level()]++;
  }
  if (total.n == 0) fail(ErrorCode::NoObservedValues, "no observed values for '" + target + "'");

  auto stat = [&](const Acc& a) {
    return kind.is_continuous() ? a.sum / static_cast<double>(a.n) : mode_of(a.counts);
  };
  table.marginal = stat(total);
  for (const auto& [k, a] : acc) table.cells.emplace(k, stat(a));
  return table;
}

ConditionalTable build_conditional_table(const Dataset& ds, const ImputationEntry& entry) {
  const std::size_t var = ds.schema().require_index(entry.target);
  const bool continuous = ds.schema().variable(var).kind.is_continuous();
  const Statistic expected = continuous ? Statistic::ConditionalMean : Statistic::ConditionalMode;
  if (entry.statistic != expected)
    fail(ErrorCode::InvalidArgument,
         "'" + entry.target + "': continuous targets use the conditional mean, discrete the mode");
  return build_conditional_table(ds, entry.target, entry.conditioners);
}

double ConditionalTable::lookup(const Dataset& ds, std::size_t row) const {
  const std::size_t var = ds.schema().require_index(target);
  const auto resolved = resolve(ds, var, conditioners);
  std::vector<std::size_t> key;
  if (!row_key(ds, row, resolved, key)) return marginal;
  auto it = cells.find(key);
  return it == cells.end() ? marginal : it->second;
}

namespace {

Dataset fill(const Dataset& ds, const ConditionalTable& table) {
  Dataset out = ds;
  const std::size_t var = ds.schema().require_index(table.target);
  const auto& kind = ds.schema().variable(var).kind;
  const auto resolved = resolve(ds, var, table.conditioners);
  std::vector<std::size_t> key;
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    if (!ds.at(r, var).is_missing()) continue;
    double v = table.marginal;
    if (row_key(ds, r, resolved, key)) {
      auto it = table.cells.find(key);
      if (it != table.cells.end()) v = it->second;
    }
    out.set(r, var, kind.is_continuous() ? Cell::number(v)
                                         : Cell::level(static_cast<std::size_t>(v)));
  }
  return out;
}

}  // namespace

FittedImputer fit_imputer(const Dataset& ds, const ImputationPlan& plan) {
  FittedImputer fitted;
  Dataset work = ds;
  for (const auto& entry : plan.entries) {
    fitted.tables.push_back(build_conditional_table(work, entry));
    work = fill(work, fitted.tables.back());
  }
  return fitted;
}

Dataset apply_imputer(const Dataset& ds, const FittedImputer& imputer) {
  Dataset out = ds;
  for (const auto& table : imputer.tables) out = fill(out, table);
  return out;
}

Dataset impute(const Dataset& ds, const ImputationPlan& plan) {
  return apply_imputer(ds, fit_imputer(ds, plan));
}

// ---------------------------------------------------------------------------
// Presets

BinsByCutpoints age_decades() {
  BinsByCutpoints b;
  b.labels.push_back("<20");
  for (int lo = 20; lo < 90; lo += 10) {
    b.cutpoints.push_back(lo);
    b.labels.push_back(std::to_string(lo) + "-" + std::to_string(lo + 9));
  }
  b.cutpoints.push_back(90);
  b.labels.push_back("90+");
  return b;
}

BinsByCutpoints bmi_categories() {
  return {{18.5, 25.0, 30.0}, {"Underweight", "Normal", "Overweight", "Obese"}};
}

BinsByCutpoints surgerytime_categories() {
  return {{90.0, 150.0}, {"Short", "Medium", "Long"}};
}

PreprocessPreset preprocess_preset(const std::string& name) {
  if (name != "eras-mst") fail(ErrorCode::UnknownPreset, "unknown preprocessing preset '" + name + "'");

  PreprocessPreset preset;
  // Raw-export encodings: four ASA classes collapse to {1,2} vs {3,4}; blood
  // loss and crystalloid volume (mL) bin into three groups.
  preset.encodings.push_back(
      {"ASA12/34", MergeLevels{{{"1", "1"}, {"2", "1"}, {"3", "3"}, {"4", "3"}}}});
  preset.encodings.push_back(
      {"bloodloss", BinsByCutpoints{{1e-9, 100.0 + 1e-9}, {"1", "2", "3"}}});
  preset.encodings.push_back(
      {"givencrystalloids", BinsByCutpoints{{1000.0, 2000.0}, {"1", "2", "3"}}});

  const Conditioner age{DerivedDiscretization{"age", age_decades()}};
  const Conditioner bmi{DerivedDiscretization{"BMI", bmi_categories()}};
  const Conditioner stime{DerivedDiscretization{"surgerytime", surgerytime_categories()}};
  auto col = [](const char* n) { return Conditioner{std::string(n)}; };
  auto mode = [](std::string target, std::vector<Conditioner> cs) {
    return ImputationEntry{std::move(target), std::move(cs), Statistic::ConditionalMode};
  };

  auto& e = preset.imputation.entries;
  e.push_back({"BMI", {age, col("gender"), col("ifdiabet")}, Statistic::ConditionalMean});
  e.push_back(mode("ifsmoke", {age, bmi, col("gender")}));
  e.push_back(mode("ifalcohol", {age, bmi, col("gender")}));
  e.push_back(mode("ASA12/34", {age, bmi}));
  e.push_back(mode("WHO", {age, bmi, col("gender")}));
  e.push_back(mode("prenutritioncond", {age, bmi, col("ASA12/34"), col("gender")}));
  e.push_back(mode("ifpresurgery", {age, bmi, col("ASA12/34"), col("ifpredisease")}));
  e.push_back(mode("ifstomacounsel", {age, bmi, col("ASA12/34"), col("ifpredisease")}));
  e.push_back(mode("ifcarbohydrate", {age, bmi, col("ASA12/34"), col("ifpredisease")}));
  e.push_back(mode("iflaxat", {age, bmi, col("ASA12/34"), col("ifpredisease")}));
  e.push_back(mode("ifanemia", {age, bmi, col("ASA12/34"), col("ifcancer")}));
  e.push_back(mode("bloodloss", {stime, col("procedure")}));
  e.push_back(mode("ifothermajors", {col("bloodloss"), stime, col("procedure")}));
  e.push_back(mode("givencrystalloids", {col("bloodloss"), stime, col("procedure")}));
  e.push_back(mode("ifgivencolloids", {col("bloodloss"), stime, col("procedure")}));
  e.push_back(mode("anaesthesiatype", {col("ifepiorspinanaest"), col("procedure")}));
  return preset;
}

}  // namespace periop

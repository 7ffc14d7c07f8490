#include "periop/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

namespace periop::synth {

namespace {

[[noreturn]] void bad(const std::string& msg) { fail(ErrorCode::InvalidSpec, msg); }

const VariableSpec* find_var(const CohortSpec& spec, const std::string& name) {
  for (const auto& v : spec.variables)
    if (v.name == name) return &v;
  return nullptr;
}

void check_feature(const CohortSpec& spec, const Feature& f) {
  const VariableSpec* v = find_var(spec, f.variable);
  if (!v) bad("outcome model references undeclared variable '" + f.variable + "'");
  if (!(f.scale > 0.0) || !std::isfinite(f.center)) bad("feature scaling must be finite and positive");
  const auto* cat = std::get_if<CategoricalMarginal>(&v->marginal);
  if (cat) {
    if (std::find(cat->levels.begin(), cat->levels.end(), f.level) == cat->levels.end())
      bad("categorical feature '" + f.variable + "' needs one of its levels");
  } else if (!f.level.empty()) {
    bad("level given for non-categorical variable '" + f.variable + "'");
  }
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * 3.14159265358979323846); }

}  // namespace

double truncated_normal_mean(double mean, double sd, double lo, double hi) {
  const double a = (lo - mean) / sd, b = (hi - mean) / sd;
  const double z = normal_cdf(b) - normal_cdf(a);
  return mean + sd * (normal_pdf(a) - normal_pdf(b)) / z;
}

void validate(const CohortSpec& spec) {
  if (spec.n_rows == 0) bad("n_rows must be positive");
  if (spec.variables.empty()) bad("spec declares no variables");
  if (spec.outcomes.empty()) bad("spec declares no outcome");
  std::set<std::string> names;
  for (const auto& v : spec.variables) {
    if (!names.insert(v.name).second) bad("duplicate variable '" + v.name + "'");
    if (!(v.missing_rate >= 0.0 && v.missing_rate < 1.0)) bad("missing rate of '" + v.name + "' outside [0, 1)");
    std::visit(
        [&](const auto& m) {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, BernoulliMarginal>) {
            if (!(m.p >= 0.0 && m.p <= 1.0)) bad("Bernoulli p of '" + v.name + "' outside [0, 1]");
          } else if constexpr (std::is_same_v<T, CategoricalMarginal>) {
            if (m.levels.empty() || m.levels.size() != m.probs.size())
              bad("categorical '" + v.name + "' needs one probability per level");
            double s = 0.0;
            for (double p : m.probs) {
              if (!(p >= 0.0 && p <= 1.0)) bad("probability of '" + v.name + "' outside [0, 1]");
              s += p;
            }
            if (std::abs(s - 1.0) > 1e-9) bad("probabilities of '" + v.name + "' do not sum to 1");
            if (std::set<std::string>(m.levels.begin(), m.levels.end()).size() != m.levels.size())
              bad("duplicate levels in '" + v.name + "'");
          } else if constexpr (std::is_same_v<T, TruncNormalMarginal>) {
            if (!(m.sd > 0.0) || !(m.lo < m.hi)) bad("truncated normal '" + v.name + "' is degenerate");
            const double mass = normal_cdf((m.hi - m.mean) / m.sd) - normal_cdf((m.lo - m.mean) / m.sd);
            if (!(mass > 1e-4)) bad("truncation range of '" + v.name + "' holds almost no mass");
          } else {
            if (!(m.lo < m.hi)) bad("uniform '" + v.name + "' needs lo < hi");
          }
        },
        v.marginal);
  }
  std::set<std::string> outcome_names;
  for (const auto& o : spec.outcomes) {
    if (names.count(o.name) || !outcome_names.insert(o.name).second) bad("outcome name '" + o.name + "' clashes");
    for (const auto& e : o.effects) check_feature(spec, e.feature);
    for (const auto& i : o.interactions) {
      check_feature(spec, i.a);
      check_feature(spec, i.b);
    }
    if (o.target_prevalence && !(*o.target_prevalence > 0.0 && *o.target_prevalence < 1.0))
      bad("target prevalence must lie in (0, 1)");
  }
  if (spec.year && spec.year->train_rows > spec.n_rows) bad("year column train rows exceed n_rows");
}

Schema schema_of(const CohortSpec& spec) {
  std::vector<Variable> vars;
  for (const auto& v : spec.variables) {
    VariableKind kind = VariableKind::continuous();
    if (std::holds_alternative<BernoulliMarginal>(v.marginal)) {
      kind = VariableKind::binary();
    } else if (const auto* cat = std::get_if<CategoricalMarginal>(&v.marginal)) {
      kind = cat->ordinal ? VariableKind::ordinal(cat->levels) : VariableKind::nominal(cat->levels);
    }
    vars.push_back({v.name, kind});
  }
  std::vector<std::string> outcomes;
  for (const auto& o : spec.outcomes) outcomes.push_back(o.name);
  std::vector<std::string> meta;
  if (spec.year) meta.push_back("year");
  return Schema(std::move(vars), std::move(outcomes), std::move(meta));
}

namespace {

double draw_trunc_normal(const TruncNormalMarginal& m, std::mt19937_64& rng,
                         std::normal_distribution<double>& norm) {
  for (int attempt = 0; attempt < 1000000; ++attempt) {
    const double x = m.mean + m.sd * norm(rng);
    if (x < m.lo || x > m.hi) continue;
    if (!m.integer) return x;
    return std::clamp(std::round(x), std::ceil(m.lo), std::floor(m.hi));
  }
  bad("truncated normal rejection sampling did not terminate");
}

double feature_value(const Dataset& ds, const Schema& schema, const Feature& f, std::size_t row) {
  const std::size_t idx = schema.require_index(f.variable);
  const Cell& c = ds.at(row, idx);
  const auto& kind = schema.variable(idx).kind;
  if (kind.is_factor()) return c.level() == *kind.level_index(f.level) ? 1.0 : 0.0;
  return (c.numeric() - f.center) / f.scale;
}

double sigmoid(double eta) {
  if (eta >= 0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

double solve_intercept(const std::vector<double>& eta, double target) {
  auto prevalence = [&](double b) {
    double s = 0.0;
    for (double e : eta) s += sigmoid(e + b);
    return s / static_cast<double>(eta.size());
  };
  double lo = -60.0, hi = 60.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (prevalence(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

GeneratedCohort generate(const CohortSpec& spec) {
  validate(spec);
  const Schema schema = schema_of(spec);
  GeneratedCohort out{Dataset(schema, spec.n_rows), {}, {}};
  Dataset& ds = out.data;
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  for (std::size_t v = 0; v < spec.variables.size(); ++v) {
    const Marginal& m = spec.variables[v].marginal;
    std::normal_distribution<double> norm(0.0, 1.0);
    for (std::size_t r = 0; r < spec.n_rows; ++r) {
      Cell cell;
      if (const auto* b = std::get_if<BernoulliMarginal>(&m)) {
        cell = Cell::level(unif(rng) < b->p ? 1 : 0);
      } else if (const auto* c = std::get_if<CategoricalMarginal>(&m)) {
        const double u = unif(rng);
        std::size_t level = c->probs.size() - 1;
        double acc = 0.0;
        for (std::size_t l = 0; l < c->probs.size(); ++l) {
          acc += c->probs[l];
          if (u < acc) {
            level = l;
            break;
          }
        }
        cell = Cell::level(level);
      } else if (const auto* t = std::get_if<TruncNormalMarginal>(&m)) {
        cell = Cell::number(draw_trunc_normal(*t, rng, norm));
      } else {
        const auto& uni = std::get<UniformMarginal>(m);
        cell = Cell::number(uni.lo + (uni.hi - uni.lo) * unif(rng));
      }
      ds.set(r, v, cell);
    }
  }

  for (std::size_t k = 0; k < spec.outcomes.size(); ++k) {
    const OutcomeModel& model = spec.outcomes[k];
    std::vector<double> eta(spec.n_rows, 0.0);
    for (std::size_t r = 0; r < spec.n_rows; ++r) {
      double e = 0.0;
      for (const auto& eff : model.effects) e += eff.coef * feature_value(ds, schema, eff.feature, r);
      for (const auto& in : model.interactions)
        e += in.coef * feature_value(ds, schema, in.a, r) * feature_value(ds, schema, in.b, r);
      eta[r] = e;
    }
    const double b0 = model.target_prevalence ? solve_intercept(eta, *model.target_prevalence) : model.intercept;
    std::vector<double> p(spec.n_rows);
    for (std::size_t r = 0; r < spec.n_rows; ++r) {
      p[r] = sigmoid(eta[r] + b0);
      ds.set_outcome(r, k, unif(rng) < p[r] ? 1 : 0);
    }
    out.truth.push_back(std::move(p));
    out.intercepts.push_back(b0);
  }

  // Exact missing counts: round(rate * n) rows per variable.
  for (std::size_t v = 0; v < spec.variables.size(); ++v) {
    const double rate = spec.variables[v].missing_rate;
    if (rate <= 0.0) continue;
    const auto count = static_cast<std::size_t>(std::llround(rate * static_cast<double>(spec.n_rows)));
    std::vector<std::size_t> rows(spec.n_rows);
    std::iota(rows.begin(), rows.end(), 0);
    for (std::size_t i = 0; i < count; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, spec.n_rows - 1);
      std::swap(rows[i], rows[pick(rng)]);
      ds.set(rows[i], v, Cell::missing());
    }
  }

  if (spec.year) {
    const YearColumn& y = *spec.year;
    const double span = y.last_train_year - y.first_year + 1.0;
    for (std::size_t r = 0; r < spec.n_rows; ++r) {
      double year = y.test_year;
      if (r < y.train_rows)
        year = y.first_year +
               std::floor(static_cast<double>(r) * span / static_cast<double>(y.train_rows));
      ds.set_metadata(r, 0, year);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Presets

namespace {

VariableSpec bern(std::string name, double p, double missing = 0.0) {
  return {std::move(name), BernoulliMarginal{p}, missing};
}
VariableSpec cat(std::string name, std::vector<std::string> levels, std::vector<double> probs, bool ordinal,
                 double missing = 0.0) {
  return {std::move(name), CategoricalMarginal{std::move(levels), std::move(probs), ordinal}, missing};
}
VariableSpec tnorm(std::string name, double mean, double sd, double lo, double hi, bool integer,
                   double missing = 0.0) {
  return {std::move(name), TruncNormalMarginal{mean, sd, lo, hi, integer}, missing};
}
Effect lin(std::string var, double coef, double center = 0.0, double scale = 1.0) {
  return {Feature{std::move(var), "", center, scale}, coef};
}
Effect lvl(std::string var, std::string level, double coef) {
  return {Feature{std::move(var), std::move(level), 0.0, 1.0}, coef};
}

// Missing counts of the imputation table over 767 rows.
double miss(double count) { return count / 767.0; }

CohortSpec eras_like() {
  CohortSpec s;
  s.name = "eras-like";
  s.n_rows = 767;
  s.year = YearColumn{580};
  const std::vector<std::string> l12{"1", "2"};
  s.variables = {
      tnorm("age", 65.3, 13.0, 20, 92, true),
      bern("ifalcohol", 0.53, miss(7)),
      tnorm("BMI", 26.3, 4.8, 14.03, 48.33, false, miss(63)),
      cat("ASA12/34", {"1", "3"}, {0.60, 0.40}, true, miss(6)),
      bern("gender", 0.51),
      bern("ifpredisease", 0.31),
      bern("ifdiabet", 0.13),
      bern("ifheart", 0.10),
      bern("ifpulmonary", 0.13),
      bern("WHO", 0.12, miss(44)),
      bern("ifsmoke", 0.23, miss(4)),
      bern("prenutritioncond", 0.23, miss(48)),
      bern("ifpresurgery", 0.52, miss(3)),
      bern("ifradiotherapy", 0.076),
      bern("iflaxat", 0.20, miss(6)),
      bern("ifstomacounsel", 0.37, miss(1)),
      bern("ifcarbohydrate", 0.87, miss(1)),
      bern("ifanemia", 0.13, miss(79)),
      bern("ifopensurgery", 0.25),
      bern("ifothermajors", 0.21, miss(2)),
      bern("ifbowelanas", 0.79),
      bern("ifmuscledrug", 0.09),
      cat("anaesthesiatype", l12, {0.24, 0.76}, false, miss(8)),
      bern("ifheartdrug", 0.73),
      cat("bloodloss", {"1", "2", "3"}, {0.61, 0.22, 0.17}, true, miss(4)),
      bern("ifgivencolloids", 0.16, miss(16)),
      cat("givencrystalloids", {"1", "2", "3"}, {0.37, 0.50, 0.13}, true, miss(16)),
      tnorm("surgerytime", 112.0, 55.0, 15, 475, true),
      cat("procedure", l12, {0.82, 0.18}, false),
      bern("ifconverted", 0.067),
      bern("stomaproc", 0.29),
      cat("ifepiorspinanaest", {"0", "1", "2"}, {0.11, 0.82, 0.07}, false),
      cat("subprocedure", {"1", "2", "3", "4"}, {0.39, 0.16, 0.05, 0.40}, false),
      bern("ifcancer", 0.64),
  };

  OutcomeModel any{"anycomp", 0.0, {}, {}, 0.33};
  any.effects = {
      lin("WHO", 1.1),
      lin("ifothermajors", 0.8),
      lin("surgerytime", 0.4, 118.0, 55.0),
      lin("ifopensurgery", 0.5),
      lin("ifpulmonary", 0.7),
      lvl("givencrystalloids", "3", 0.9),
      lvl("bloodloss", "3", 0.6),
      lvl("ASA12/34", "3", 0.4),
      lin("ifconverted", 0.6),
      lin("ifsmoke", 0.3),
      lin("ifanemia", 0.4),
      lin("ifpredisease", 0.3),
      lin("ifalcohol", -0.3),
      lin("ifradiotherapy", -0.5),
  };
  OutcomeModel serious{"seriouscomp", 0.0, {}, {}, 62.0 / 580.0};
  serious.effects = {
      lvl("bloodloss", "3", 1.0),
      lvl("bloodloss", "2", 0.2),
      lin("surgerytime", 0.5, 118.0, 55.0),
      lin("ifothermajors", 0.8),
      lin("ifconverted", 1.0),
      lin("ifgivencolloids", 0.6),
      lvl("givencrystalloids", "3", 0.8),
      lin("WHO", 0.8),
      lvl("ifepiorspinanaest", "2", 0.9),
      lvl("procedure", "2", 0.5),
      lin("ifpulmonary", 0.5),
      lin("ifstomacounsel", 0.4),
      lin("ifheart", 0.3),
  };
  s.outcomes = {any, serious};
  return s;
}

CohortSpec separable() {
  CohortSpec s;
  s.name = "separable";
  s.n_rows = 1000;
  s.year = YearColumn{750};
  s.variables = {tnorm("x1", 0, 1, -1e300, 1e300, false), tnorm("x2", 0, 1, -1e300, 1e300, false),
                 tnorm("x3", 0, 1, -1e300, 1e300, false), bern("b1", 0.4), bern("b2", 0.5),
                 cat("c1", {"a", "b", "c"}, {0.3, 0.4, 0.3}, false)};
  s.outcomes = {OutcomeModel{"outcome", 0.0, {lin("x1", 10.0)}, {}, std::nullopt}};
  return s;
}

CohortSpec noise_heavy() {
  CohortSpec s;
  s.name = "noise-heavy";
  s.n_rows = 767;
  s.year = YearColumn{580};
  // eleven-level nominal codes, uniform
  std::vector<std::string> codes;
  for (int l = 0; l < 11; ++l) codes.push_back("c" + std::to_string(l));
  const std::vector<double> flat(codes.size(), 1.0 / static_cast<double>(codes.size()));
  for (int i = 1; i <= 4; ++i) s.variables.push_back(cat("z" + std::to_string(i), codes, flat, false));
  s.outcomes = {OutcomeModel{"outcome", 0.0, {}, {}, 0.2}};
  return s;
}

CohortSpec interaction() {
  CohortSpec s;
  s.name = "interaction";
  s.n_rows = 767;
  s.year = YearColumn{580};
  s.variables = {
      tnorm("BMI", 26.3, 4.8, 14.03, 48.33, false),
      cat("procedure", {"1", "2"}, {0.82, 0.18}, false),
      tnorm("age", 65.3, 13.0, 20, 92, true),
      bern("gender", 0.51),
      bern("ifsmoke", 0.23),
      bern("ifdiabet", 0.13),
  };
  OutcomeModel m{"outcome", 0.0, {}, {}, 0.2};
  m.effects = {lin("BMI", 0.2, 26.3, 4.8), lvl("procedure", "2", 0.3), lin("age", 0.2, 65.3, 13.0)};
  // Risk climbs with BMI for rectal procedures only.
  m.interactions = {Interaction{Feature{"BMI", "", 26.3, 4.8}, Feature{"procedure", "2", 0.0, 1.0}, 1.2}};
  s.outcomes = {m};
  return s;
}

CohortSpec three_signal() {
  CohortSpec s;
  s.name = "three-signal";
  s.n_rows = 1000;
  s.year = YearColumn{750};
  const double inf = 1e300;
  s.variables = {
      tnorm("s1", 0, 1, -inf, inf, false),
      tnorm("s2", 0, 1, -inf, inf, false),
      tnorm("s3", 10, 3, 0, 20, false),
      bern("m1", 0.5),
  };
  for (int i = 1; i <= 8; ++i) s.variables.push_back(tnorm("n" + std::to_string(i), 0, 1, -inf, inf, false));
  for (int i = 9; i <= 14; ++i) s.variables.push_back(bern("n" + std::to_string(i), 0.2 + 0.05 * (i - 9)));
  s.variables.push_back(cat("n15", {"lo", "mid", "hi"}, {0.3, 0.4, 0.3}, true));
  s.variables.push_back(cat("n16", {"a", "b", "c"}, {0.5, 0.3, 0.2}, false));
  OutcomeModel m{"outcome", 0.0, {}, {}, 0.3};
  m.effects = {lin("s1", 1.2), lin("s2", 1.5), lin("s3", -1.2, 10.0, 3.0), lin("m1", 0.6)};
  s.outcomes = {m};
  return s;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"eras-like", "separable", "noise-heavy", "interaction", "three-signal"};
}

CohortSpec preset(const std::string& name, std::uint64_t seed) {
  CohortSpec s;
  if (name == "eras-like") s = eras_like();
  else if (name == "separable") s = separable();
  else if (name == "noise-heavy") s = noise_heavy();
  else if (name == "interaction") s = interaction();
  else if (name == "three-signal") s = three_signal();
  else fail(ErrorCode::UnknownPreset, "unknown cohort preset '" + name + "'");
  s.seed = seed;
  return s;
}

}  // namespace periop::synth

#include "periop/data.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace periop {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidSchema: return "InvalidSchema";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::UnparseableCell: return "UnparseableCell";
    case ErrorCode::UnknownColumn: return "UnknownColumn";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::MissingOutcome: return "MissingOutcome";
    case ErrorCode::UnknownOutcome: return "UnknownOutcome";
    case ErrorCode::UnknownVariable: return "UnknownVariable";
    case ErrorCode::EmptyPartition: return "EmptyPartition";
    case ErrorCode::UnmappedLevel: return "UnmappedLevel";
    case ErrorCode::NoObservedValues: return "NoObservedValues";
    case ErrorCode::OneClassOnly: return "OneClassOnly";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InvalidProbability: return "InvalidProbability";
    case ErrorCode::MissingValuePresent: return "MissingValuePresent";
    case ErrorCode::ConstantFactor: return "ConstantFactor";
    case ErrorCode::SingularHessian: return "SingularHessian";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyNode: return "EmptyNode";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::UnknownPreset: return "UnknownPreset";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

std::string_view to_string(KindTag tag) noexcept {
  switch (tag) {
    case KindTag::Continuous: return "continuous";
    case KindTag::Binary: return "binary";
    case KindTag::Ordinal: return "ordinal";
    case KindTag::Nominal: return "nominal";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// VariableKind

VariableKind::VariableKind(KindTag tag, std::vector<std::string> levels)
    : tag_(tag), levels_(std::move(levels)) {
  if (is_factor()) {
    if (levels_.empty()) fail(ErrorCode::InvalidSchema, "factor kind needs at least one level");
    std::set<std::string> seen(levels_.begin(), levels_.end());
    if (seen.size() != levels_.size())
      fail(ErrorCode::InvalidSchema, "duplicate level label in factor kind");
  }
}

VariableKind VariableKind::continuous() { return VariableKind(KindTag::Continuous, {}); }
VariableKind VariableKind::binary() { return VariableKind(KindTag::Binary, {"0", "1"}); }
VariableKind VariableKind::ordinal(std::vector<std::string> levels) {
  return VariableKind(KindTag::Ordinal, std::move(levels));
}
VariableKind VariableKind::nominal(std::vector<std::string> levels) {
  return VariableKind(KindTag::Nominal, std::move(levels));
}

std::optional<std::size_t> VariableKind::level_index(std::string_view label) const {
  for (std::size_t i = 0; i < levels_.size(); ++i)
    if (levels_[i] == label) return i;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Schema

Schema::Schema(std::vector<Variable> variables, std::vector<std::string> outcomes,
               std::vector<std::string> metadata)
    : variables_(std::move(variables)),
      outcomes_(std::move(outcomes)),
      metadata_(std::move(metadata)) {
  validate();
}

void Schema::validate() const {
  std::set<std::string> names;
  auto add = [&](const std::string& name) {
    if (name.empty()) fail(ErrorCode::InvalidSchema, "empty column name");
    if (!names.insert(name).second)
      fail(ErrorCode::InvalidSchema, "duplicate column name '" + name + "'");
  };
  for (const auto& v : variables_) add(v.name);
  for (const auto& o : outcomes_) add(o);
  for (const auto& m : metadata_) add(m);
}

std::optional<std::size_t> Schema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i)
    if (variables_[i].name == name) return i;
  return std::nullopt;
}

std::size_t Schema::require_index(std::string_view name) const {
  auto idx = index_of(name);
  if (!idx) fail(ErrorCode::UnknownVariable, "unknown variable '" + std::string(name) + "'");
  return *idx;
}

std::optional<std::size_t> Schema::outcome_index(std::string_view name) const {
  auto it = std::find(outcomes_.begin(), outcomes_.end(), name);
  if (it == outcomes_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - outcomes_.begin());
}

std::optional<std::size_t> Schema::metadata_index(std::string_view name) const {
  auto it = std::find(metadata_.begin(), metadata_.end(), name);
  if (it == metadata_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - metadata_.begin());
}

std::vector<std::string> Schema::variable_names() const {
  std::vector<std::string> out;
  out.reserve(variables_.size());
  for (const auto& v : variables_) out.push_back(v.name);
  return out;
}

Schema Schema::with_kind(std::size_t index, VariableKind kind) const {
  Schema copy = *this;
  copy.variables_.at(index).kind = std::move(kind);
  return copy;
}

// ---------------------------------------------------------------------------
// Cell

double Cell::number() const {
  if (!is_number()) fail(ErrorCode::InvalidArgument, "cell does not hold a number");
  return value_;
}

std::size_t Cell::level() const {
  if (!is_level()) fail(ErrorCode::InvalidArgument, "cell does not hold a level");
  return static_cast<std::size_t>(value_);
}

// ---------------------------------------------------------------------------
// Dataset

Dataset::Dataset(Schema schema, std::size_t n_rows)
    : schema_(std::move(schema)), n_rows_(n_rows) {
  cells_.assign(n_rows_ * schema_.size(), Cell::missing());
  outcomes_.assign(schema_.outcomes().size(), std::vector<std::uint8_t>(n_rows_, 0));
  metadata_.assign(schema_.metadata().size(), std::vector<double>(n_rows_, std::nan("")));
}

void Dataset::set(std::size_t row, std::size_t var, Cell cell) {
  if (row >= n_rows_ || var >= n_vars())
    fail(ErrorCode::InvalidArgument, "cell position out of range");
  const auto& kind = schema_.variable(var).kind;
  if (!cell.is_missing()) {
    if (kind.is_continuous()) {
      if (!cell.is_number() || !std::isfinite(cell.number()))
        fail(ErrorCode::InvalidArgument,
             "continuous column '" + schema_.variable(var).name + "' needs a finite number");
    } else if (!cell.is_level() || cell.level() >= kind.cardinality()) {
      fail(ErrorCode::InvalidArgument,
           "level out of range for column '" + schema_.variable(var).name + "'");
    }
  }
  cells_[row * n_vars() + var] = cell;
}

std::span<const std::uint8_t> Dataset::outcome(std::string_view name) const {
  auto k = schema_.outcome_index(name);
  if (!k) fail(ErrorCode::UnknownOutcome, "unknown outcome '" + std::string(name) + "'");
  return outcomes_[*k];
}

void Dataset::set_outcome(std::size_t row, std::size_t k, std::uint8_t label) {
  if (label > 1) fail(ErrorCode::InvalidArgument, "outcome labels must be 0 or 1");
  outcomes_.at(k).at(row) = label;
}

void Dataset::set_metadata(std::size_t row, std::size_t k, double value) {
  metadata_.at(k).at(row) = value;
}

std::vector<double> Dataset::column(std::size_t var) const {
  std::vector<double> out(n_rows_);
  for (std::size_t r = 0; r < n_rows_; ++r) out[r] = at(r, var).numeric();
  return out;
}

std::size_t Dataset::missing_count(std::size_t var) const {
  std::size_t n = 0;
  for (std::size_t r = 0; r < n_rows_; ++r) n += at(r, var).is_missing();
  return n;
}

std::size_t Dataset::missing_count() const {
  return static_cast<std::size_t>(
      std::count_if(cells_.begin(), cells_.end(), [](const Cell& c) { return c.is_missing(); }));
}

Dataset Dataset::select_rows(std::span<const std::size_t> rows) const {
  Dataset out(schema_, rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::size_t r = rows[i];
    if (r >= n_rows_) fail(ErrorCode::InvalidArgument, "row index out of range");
    std::copy_n(cells_.begin() + static_cast<std::ptrdiff_t>(r * n_vars()), n_vars(),
                out.cells_.begin() + static_cast<std::ptrdiff_t>(i * n_vars()));
    for (std::size_t k = 0; k < outcomes_.size(); ++k) out.outcomes_[k][i] = outcomes_[k][r];
    for (std::size_t k = 0; k < metadata_.size(); ++k) out.metadata_[k][i] = metadata_[k][r];
  }
  return out;
}

Dataset Dataset::with_schema(Schema schema) const {
  if (schema.size() != schema_.size() || schema.outcomes() != schema_.outcomes() ||
      schema.metadata() != schema_.metadata())
    fail(ErrorCode::InvalidSchema, "replacement schema has a different column layout");
  Dataset out = *this;
  out.schema_ = std::move(schema);
  return out;
}

bool operator==(const Dataset& a, const Dataset& b) {
  if (a.schema_ != b.schema_ || a.n_rows_ != b.n_rows_ || a.cells_ != b.cells_ ||
      a.outcomes_ != b.outcomes_ || a.metadata_.size() != b.metadata_.size())
    return false;
  for (std::size_t k = 0; k < a.metadata_.size(); ++k)
    for (std::size_t r = 0; r < a.n_rows_; ++r) {
      const double x = a.metadata_[k][r], y = b.metadata_[k][r];
      if (!(x == y || (std::isnan(x) && std::isnan(y)))) return false;
    }
  return true;
}

// ---------------------------------------------------------------------------
// CSV

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

bool is_missing_token(std::string_view s) { return s.empty() || s == "NA"; }

std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

enum class Slot { Variable, Outcome, Metadata };

}  // namespace

Dataset parse_csv(std::string_view text, const Schema& schema) {
  std::vector<std::string> lines;
  {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(pos, end - pos);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      lines.emplace_back(line);
      pos = end + 1;
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
  }
  if (lines.empty()) fail(ErrorCode::IoError, "CSV has no header row");

  auto header = split_csv_line(lines[0]);
  if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0) header[0].erase(0, 3);

  std::vector<std::pair<Slot, std::size_t>> binding(header.size());
  std::set<std::string> seen;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto& name = header[c];
    if (!seen.insert(name).second)
      fail(ErrorCode::UnknownColumn, "duplicate header column '" + name + "'");
    if (auto v = schema.index_of(name)) {
      binding[c] = {Slot::Variable, *v};
    } else if (auto o = schema.outcome_index(name)) {
      binding[c] = {Slot::Outcome, *o};
    } else if (auto m = schema.metadata_index(name)) {
      binding[c] = {Slot::Metadata, *m};
    } else {
      fail(ErrorCode::UnknownColumn, "header column '" + name + "' is not in the schema");
    }
  }
  const std::size_t expected =
      schema.size() + schema.outcomes().size() + schema.metadata().size();
  if (seen.size() != expected) {
    for (const auto& n : schema.variable_names())
      if (!seen.count(n)) fail(ErrorCode::MissingColumn, "schema column '" + n + "' absent from CSV");
    for (const auto& n : schema.outcomes())
      if (!seen.count(n)) fail(ErrorCode::MissingColumn, "outcome column '" + n + "' absent from CSV");
    for (const auto& n : schema.metadata())
      if (!seen.count(n)) fail(ErrorCode::MissingColumn, "metadata column '" + n + "' absent from CSV");
  }

  Dataset ds(schema, lines.size() - 1);
  for (std::size_t r = 0; r + 1 < lines.size(); ++r) {
    auto fields = split_csv_line(lines[r + 1]);
    if (fields.size() != header.size())
      fail(ErrorCode::UnparseableCell, "row " + std::to_string(r) + " has " +
                                           std::to_string(fields.size()) + " fields, expected " +
                                           std::to_string(header.size()));
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const std::string& raw = fields[c];
      auto bad = [&]() {
        fail(ErrorCode::UnparseableCell,
             "row " + std::to_string(r) + ", column '" + header[c] + "': '" + raw + "'");
      };
      const auto [slot, idx] = binding[c];
      if (slot == Slot::Outcome) {
        if (is_missing_token(raw))
          fail(ErrorCode::MissingOutcome,
               "row " + std::to_string(r) + ": outcome '" + header[c] + "' is missing");
        if (raw == "0") ds.set_outcome(r, idx, 0);
        else if (raw == "1") ds.set_outcome(r, idx, 1);
        else bad();
        continue;
      }
      if (slot == Slot::Metadata) {
        if (is_missing_token(raw)) continue;
        auto v = parse_double(raw);
        if (!v) bad();
        ds.set_metadata(r, idx, *v);
        continue;
      }
      if (is_missing_token(raw)) continue;
      const auto& kind = schema.variable(idx).kind;
      if (kind.is_continuous()) {
        auto v = parse_double(raw);
        if (!v || !std::isfinite(*v)) bad();
        ds.set(r, idx, Cell::number(*v));
      } else {
        auto level = kind.level_index(raw);
        if (!level) bad();
        ds.set(r, idx, Cell::level(*level));
      }
    }
  }
  return ds;
}

Dataset load_csv(const std::filesystem::path& path, const Schema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), schema);
}

std::string to_csv(const Dataset& ds) {
  const Schema& schema = ds.schema();
  std::ostringstream out;
  bool first = true;
  auto sep = [&]() {
    if (!first) out << ',';
    first = false;
  };
  for (const auto& v : schema.variables()) sep(), out << quote_if_needed(v.name);
  for (const auto& m : schema.metadata()) sep(), out << quote_if_needed(m);
  for (const auto& o : schema.outcomes()) sep(), out << quote_if_needed(o);
  out << '\n';
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    first = true;
    for (std::size_t v = 0; v < ds.n_vars(); ++v) {
      sep();
      const Cell& cell = ds.at(r, v);
      if (cell.is_missing()) out << "NA";
      else if (cell.is_number()) out << format_number(cell.number());
      else out << quote_if_needed(schema.variable(v).kind.levels()[cell.level()]);
    }
    for (std::size_t k = 0; k < schema.metadata().size(); ++k) {
      sep();
      const double m = ds.metadata(k)[r];
      if (std::isnan(m)) out << "NA";
      else out << format_number(m);
    }
    for (std::size_t k = 0; k < schema.outcomes().size(); ++k) {
      sep();
      out << static_cast<int>(ds.outcome(k)[r]);
    }
    out << '\n';
  }
  return out.str();
}

void write_csv(const std::filesystem::path& path, const Dataset& ds) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  out << to_csv(ds);
}

// ---------------------------------------------------------------------------
// Splitting and counts

Partition temporal_split(const Dataset& ds, const SplitSpec& spec) {
  Partition part;
  if (const auto* t = std::get_if<ThresholdSplit>(&spec)) {
    std::vector<double> values;
    if (auto m = ds.schema().metadata_index(t->column)) {
      auto col = ds.metadata(*m);
      values.assign(col.begin(), col.end());
    } else if (auto v = ds.schema().index_of(t->column);
               v && ds.schema().variable(*v).kind.is_continuous()) {
      values = ds.column(*v);
    } else {
      fail(ErrorCode::UnknownColumn,
           "split column '" + t->column + "' is not a numeric metadata or continuous column");
    }
    for (std::size_t r = 0; r < values.size(); ++r) {
      if (std::isnan(values[r]))
        fail(ErrorCode::InvalidArgument,
             "split column '" + t->column + "' is missing at row " + std::to_string(r));
      (values[r] < t->cutoff ? part.train_rows : part.test_rows).push_back(r);
    }
  } else {
    const auto& idx = std::get<IndexSplit>(spec).train_rows;
    std::vector<bool> in_train(ds.n_rows(), false);
    for (std::size_t r : idx) {
      if (r >= ds.n_rows())
        fail(ErrorCode::InvalidArgument, "split index " + std::to_string(r) + " out of range");
      in_train[r] = true;
    }
    for (std::size_t r = 0; r < ds.n_rows(); ++r)
      (in_train[r] ? part.train_rows : part.test_rows).push_back(r);
  }
  if (part.train_rows.empty() || part.test_rows.empty())
    fail(ErrorCode::EmptyPartition,
         "split leaves " + std::to_string(part.train_rows.size()) + " train / " +
             std::to_string(part.test_rows.size()) + " test rows");
  part.train = ds.select_rows(part.train_rows);
  part.test = ds.select_rows(part.test_rows);
  return part;
}

ClassCounts class_counts(std::span<const std::uint8_t> labels) {
  ClassCounts c;
  for (auto y : labels) (y ? c.n1 : c.n0)++;
  return c;
}

ClassCounts class_counts(const Dataset& ds, std::string_view outcome) {
  return class_counts(ds.outcome(outcome));
}

}  // namespace periop

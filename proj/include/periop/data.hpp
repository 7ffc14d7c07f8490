#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "periop/error.hpp"

namespace periop {

enum class KindTag { Continuous, Binary, Ordinal, Nominal };

// Column typing. Binary columns carry the implicit level list {"0", "1"} so
// every discrete column is addressed by level index.
class VariableKind {
 public:
  static VariableKind continuous();
  static VariableKind binary();
  static VariableKind ordinal(std::vector<std::string> levels);
  static VariableKind nominal(std::vector<std::string> levels);

  KindTag tag() const noexcept { return tag_; }
  bool is_continuous() const noexcept { return tag_ == KindTag::Continuous; }
  bool is_discrete() const noexcept { return !is_continuous(); }
  bool is_factor() const noexcept {
    return tag_ == KindTag::Ordinal || tag_ == KindTag::Nominal;
  }

  // Level labels; empty for continuous columns.
  const std::vector<std::string>& levels() const noexcept { return levels_; }
  std::size_t cardinality() const noexcept { return levels_.size(); }
  std::optional<std::size_t> level_index(std::string_view label) const;

  friend bool operator==(const VariableKind&, const VariableKind&) = default;

 private:
  VariableKind(KindTag tag, std::vector<std::string> levels);

  KindTag tag_ = KindTag::Continuous;
  std::vector<std::string> levels_;
};

std::string_view to_string(KindTag tag) noexcept;

struct Variable {
  std::string name;
  VariableKind kind;

  friend bool operator==(const Variable&, const Variable&) = default;
};

// Ordered predictor list plus outcome and metadata column names. A variable's
// position is its stable index everywhere downstream. Metadata columns are
// numeric (e.g. surgery year) and never enter a model.
class Schema {
 public:
  Schema() = default;
  Schema(std::vector<Variable> variables, std::vector<std::string> outcomes,
         std::vector<std::string> metadata = {});

  const std::vector<Variable>& variables() const noexcept { return variables_; }
  const std::vector<std::string>& outcomes() const noexcept { return outcomes_; }
  const std::vector<std::string>& metadata() const noexcept { return metadata_; }
  std::size_t size() const noexcept { return variables_.size(); }
  const Variable& variable(std::size_t i) const { return variables_.at(i); }

  std::optional<std::size_t> index_of(std::string_view name) const;
  std::size_t require_index(std::string_view name) const;
  std::optional<std::size_t> outcome_index(std::string_view name) const;
  std::optional<std::size_t> metadata_index(std::string_view name) const;
  std::vector<std::string> variable_names() const;

  // Copy with one variable's kind replaced.
  Schema with_kind(std::size_t index, VariableKind kind) const;

  friend bool operator==(const Schema&, const Schema&) = default;

 private:
  void validate() const;

  std::vector<Variable> variables_;
  std::vector<std::string> outcomes_;
  std::vector<std::string> metadata_;
};

class Cell {
 public:
  constexpr Cell() = default;
  static constexpr Cell missing() { return Cell{}; }
  static constexpr Cell number(double v) { return Cell{Tag::Number, v}; }
  static constexpr Cell level(std::size_t index) {
    return Cell{Tag::Level, static_cast<double>(index)};
  }

  constexpr bool is_missing() const noexcept { return tag_ == Tag::Missing; }
  constexpr bool is_number() const noexcept { return tag_ == Tag::Number; }
  constexpr bool is_level() const noexcept { return tag_ == Tag::Level; }
  double number() const;
  std::size_t level() const;
  // Number, or level index as a real; NaN for Missing.
  constexpr double numeric() const noexcept {
    return is_missing() ? std::numeric_limits<double>::quiet_NaN() : value_;
  }

  friend constexpr bool operator==(const Cell& a, const Cell& b) noexcept {
    return a.tag_ == b.tag_ && (a.tag_ == Tag::Missing || a.value_ == b.value_);
  }

 private:
  enum class Tag : std::uint8_t { Missing, Number, Level };
  constexpr Cell(Tag tag, double v) : tag_(tag), value_(v) {}

  Tag tag_ = Tag::Missing;
  double value_ = 0.0;
};

// Row-major predictor grid plus outcome and metadata columns. Outcomes are
// never Missing; metadata cells may be NaN.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(Schema schema, std::size_t n_rows = 0);

  const Schema& schema() const noexcept { return schema_; }
  std::size_t n_rows() const noexcept { return n_rows_; }
  std::size_t n_vars() const noexcept { return schema_.size(); }

  const Cell& at(std::size_t row, std::size_t var) const {
    return cells_[row * n_vars() + var];
  }
  // Validates the cell against the column kind.
  void set(std::size_t row, std::size_t var, Cell cell);

  std::span<const std::uint8_t> outcome(std::size_t k) const { return outcomes_.at(k); }
  std::span<const std::uint8_t> outcome(std::string_view name) const;
  void set_outcome(std::size_t row, std::size_t k, std::uint8_t label);

  std::span<const double> metadata(std::size_t k) const { return metadata_.at(k); }
  void set_metadata(std::size_t row, std::size_t k, double value);

  // Numeric view of one predictor column (level index for discrete; NaN for
  // Missing).
  std::vector<double> column(std::size_t var) const;
  std::size_t missing_count(std::size_t var) const;
  std::size_t missing_count() const;

  // Rows in the given order (duplicates allowed).
  Dataset select_rows(std::span<const std::size_t> rows) const;
  // Same cells under a schema with different kinds; caller owns compatibility.
  Dataset with_schema(Schema schema) const;

  // Metadata NaNs compare equal to each other.
  friend bool operator==(const Dataset& a, const Dataset& b);

 private:
  Schema schema_;
  std::size_t n_rows_ = 0;
  std::vector<Cell> cells_;
  std::vector<std::vector<std::uint8_t>> outcomes_;
  std::vector<std::vector<double>> metadata_;
};

struct ThresholdSplit {
  std::string column;  // metadata or continuous variable
  double cutoff = 0.0; // value < cutoff goes to train
};
struct IndexSplit {
  std::vector<std::size_t> train_rows;
};
using SplitSpec = std::variant<ThresholdSplit, IndexSplit>;

struct Partition {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
};

// CSV I/O. Missing is "" or "NA"; header may permute schema columns.
Dataset load_csv(const std::filesystem::path& path, const Schema& schema);
Dataset parse_csv(std::string_view text, const Schema& schema);
std::string to_csv(const Dataset& ds);
void write_csv(const std::filesystem::path& path, const Dataset& ds);

// Shortest decimal text that round-trips to the same double.
std::string format_number(double v);

Partition temporal_split(const Dataset& ds, const SplitSpec& spec);

struct ClassCounts {
  std::size_t n0 = 0;
  std::size_t n1 = 0;
};
ClassCounts class_counts(const Dataset& ds, std::string_view outcome);
ClassCounts class_counts(std::span<const std::uint8_t> labels);

}  // namespace periop

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace periop {

// Class-1 probabilities, one per row.
using Probabilities = std::vector<double>;

struct BrierPair {
  double class0 = 0.0;
  double class1 = 0.0;
};

struct EvaluationReport {
  double auc = 0.0;
  double brier0 = 0.0;
  double brier1 = 0.0;
  std::size_t n0 = 0;
  std::size_t n1 = 0;

  double brier_gap() const noexcept { return brier1 - brier0; }
};

// Mann-Whitney AUC with ties counted 1/2.
double auc(std::span<const std::uint8_t> labels, std::span<const double> p1);

// Mean squared error of p1 within each outcome class.
BrierPair brier_per_class(std::span<const std::uint8_t> labels, std::span<const double> p1);
double brier_overall(std::span<const std::uint8_t> labels, std::span<const double> p1);

// 1 iff p1 >= cutoff.
std::vector<std::uint8_t> threshold_classify(std::span<const double> p1, double cutoff = 0.5);
double accuracy(std::span<const std::uint8_t> labels, std::span<const double> p1,
                double cutoff = 0.5);

EvaluationReport evaluate(std::span<const std::uint8_t> labels, std::span<const double> p1);

}  // namespace periop

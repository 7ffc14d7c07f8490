#include "periop/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "periop/error.hpp"

namespace periop {

namespace {

void check_inputs(std::span<const std::uint8_t> labels, std::span<const double> p1) {
  if (labels.size() != p1.size())
    fail(ErrorCode::DimensionMismatch, "labels and predictions differ in length");
  for (double p : p1)
    if (!(p >= 0.0 && p <= 1.0))
      fail(ErrorCode::InvalidProbability, "prediction outside [0, 1]");
}

}  // namespace

double auc(std::span<const std::uint8_t> labels, std::span<const double> p1) {
  check_inputs(labels, p1);
  const std::size_t n = labels.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p1[a] < p1[b]; });

  // Sum of class-1 midranks (1-based).
  double rank_sum = 0.0;
  std::size_t n1 = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && p1[order[j]] == p1[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]]) {
        rank_sum += midrank;
        ++n1;
      }
    i = j;
  }
  const std::size_t n0 = n - n1;
  if (n0 == 0 || n1 == 0) fail(ErrorCode::OneClassOnly, "AUC needs both classes");
  const double u = rank_sum - 0.5 * static_cast<double>(n1) * static_cast<double>(n1 + 1);
  return u / (static_cast<double>(n0) * static_cast<double>(n1));
}

BrierPair brier_per_class(std::span<const std::uint8_t> labels, std::span<const double> p1) {
  check_inputs(labels, p1);
  double s0 = 0.0, s1 = 0.0;
  std::size_t n0 = 0, n1 = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i]) {
      s1 += (1.0 - p1[i]) * (1.0 - p1[i]);
      ++n1;
    } else {
      s0 += p1[i] * p1[i];
      ++n0;
    }
  }
  if (n0 == 0 || n1 == 0) fail(ErrorCode::OneClassOnly, "per-class Brier needs both classes");
  return {s0 / static_cast<double>(n0), s1 / static_cast<double>(n1)};
}

double brier_overall(std::span<const std::uint8_t> labels, std::span<const double> p1) {
  check_inputs(labels, p1);
  if (labels.empty()) fail(ErrorCode::EmptyInput, "Brier score of an empty sample");
  double s = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double d = static_cast<double>(labels[i]) - p1[i];
    s += d * d;
  }
  return s / static_cast<double>(labels.size());
}

std::vector<std::uint8_t> threshold_classify(std::span<const double> p1, double cutoff) {
  std::vector<std::uint8_t> out(p1.size());
  std::transform(p1.begin(), p1.end(), out.begin(),
                 [cutoff](double p) { return static_cast<std::uint8_t>(p >= cutoff); });
  return out;
}

double accuracy(std::span<const std::uint8_t> labels, std::span<const double> p1, double cutoff) {
  check_inputs(labels, p1);
  if (labels.empty()) fail(ErrorCode::EmptyInput, "accuracy of an empty sample");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += ((p1[i] >= cutoff) == (labels[i] == 1));
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

EvaluationReport evaluate(std::span<const std::uint8_t> labels, std::span<const double> p1) {
  EvaluationReport r;
  r.auc = auc(labels, p1);
  const auto b = brier_per_class(labels, p1);
  r.brier0 = b.class0;
  r.brier1 = b.class1;
  for (auto y : labels) (y ? r.n1 : r.n0)++;
  return r;
}

}  // namespace periop

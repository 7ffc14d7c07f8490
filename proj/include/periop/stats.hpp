#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace periop {

// Type-7 (linear interpolation) sample quantile of an ascending sample.
double quantile_sorted(std::span<const double> sorted, double prob);

// Distinct type-7 quantiles of `values` (NaNs ignored), ascending.
std::vector<double> quantile_cutpoints(std::vector<double> values, std::span<const double> probs);

// Right-closed bin index: number of cutpoints strictly below `value`.
std::size_t right_closed_bin(std::span<const double> cutpoints, double value);

double mean(std::span<const double> v);
// Sample standard deviation (n - 1 denominator); NaN for fewer than two values.
double sample_sd(std::span<const double> v);

// Grid used for exploratory and information-theoretic discretization.
inline constexpr double kQuantileGrid[] = {0.10, 0.30, 0.50, 0.70, 0.90};

// Runs fn(i) for i in [0, n) on up to `workers` threads. Each index is
// processed exactly once; callers write results by index, so output does not
// depend on the worker count.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

}  // namespace periop

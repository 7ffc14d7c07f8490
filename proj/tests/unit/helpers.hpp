#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "periop/data.hpp"

namespace testing {

// One continuous predictor per coefficient, outcome drawn from the logistic
// model with the given intercept.
inline periop::Dataset logistic_data(std::size_t n, std::uint64_t seed, double b0, const std::vector<double>& b) {
  using namespace periop;
  std::vector<Variable> vars;
  for (std::size_t j = 0; j < b.size(); ++j) vars.push_back({"x" + std::to_string(j + 1), VariableKind::continuous()});
  Dataset ds(Schema(vars, {"y"}), n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> norm(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t r = 0; r < n; ++r) {
    double eta = b0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double x = norm(rng);
      ds.set(r, j, Cell::number(x));
      eta += b[j] * x;
    }
    ds.set_outcome(r, 0, unif(rng) < 1.0 / (1.0 + std::exp(-eta)) ? 1 : 0);
  }
  return ds;
}

template <class F>
periop::ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const periop::Error& e) {
    return e.code();
  }
  throw std::runtime_error("expected a periop::Error");
}

}  // namespace testing

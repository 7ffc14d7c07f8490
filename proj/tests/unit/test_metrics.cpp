#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "periop/metrics.hpp"

using namespace periop;
using testing::code_of;
using V8 = std::vector<std::uint8_t>;
using VD = std::vector<double>;

TEST_CASE("auc examples") {
  CHECK(auc(V8{1, 0}, VD{0.9, 0.1}) == 1.0);
  CHECK(auc(V8{1, 0, 1, 0}, VD{0.3, 0.3, 0.3, 0.3}) == 0.5);
  CHECK(auc(V8{1, 1, 0, 0}, VD{0.8, 0.4, 0.6, 0.2}) == 0.75);
  CHECK(code_of([] { auc(V8{1, 1}, VD{0.2, 0.3}); }) == ErrorCode::OneClassOnly);
}

TEST_CASE("auc against pair count") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    V8 y(30);
    VD p(30);
    for (std::size_t i = 0; i < 30; ++i) {
      y[i] = rng() % 2;
      p[i] = static_cast<double>(rng() % 7) / 7.0;
    }
    y[0] = 0;
    y[1] = 1;
    double wins = 0, pairs = 0;
    for (std::size_t i = 0; i < 30; ++i)
      for (std::size_t j = 0; j < 30; ++j)
        if (y[i] && !y[j]) {
          pairs += 1;
          wins += p[i] > p[j] ? 1.0 : p[i] == p[j] ? 0.5 : 0.0;
        }
    CHECK(auc(y, p) == doctest::Approx(wins / pairs).epsilon(1e-14));
  }
}

TEST_CASE("brier per class") {
  const auto b = brier_per_class(V8{1, 1, 0}, VD{0.9, 0.8, 0.0});
  CHECK(b.class1 == doctest::Approx(0.025));
  CHECK(b.class0 == 0.0);
  CHECK(testing::code_of([] { brier_per_class(V8{1, 1}, VD{0.9, 0.8}); }) == ErrorCode::OneClassOnly);
  const auto perfect = brier_per_class(V8{1, 0}, VD{1.0, 0.0});
  CHECK(perfect.class0 == 0.0);
  CHECK(perfect.class1 == 0.0);
  const auto half = brier_per_class(V8{1, 0, 0}, VD{0.5, 0.5, 0.5});
  CHECK(half.class0 == 0.25);
  CHECK(half.class1 == 0.25);
}

TEST_CASE("brier overall") {
  CHECK(brier_overall(V8{1, 0}, VD{1.0, 0.0}) == 0.0);
  CHECK(brier_overall(V8{1, 0}, VD{0.5, 0.5}) == 0.25);
  CHECK(code_of([] { brier_overall(V8{1, 0}, VD{1.5, 0.0}); }) == ErrorCode::InvalidProbability);
  CHECK(code_of([] { brier_overall(V8{1, 0}, VD{0.5}); }) == ErrorCode::DimensionMismatch);
  CHECK(code_of([] { brier_overall(V8{}, VD{}); }) == ErrorCode::EmptyInput);
}

TEST_CASE("threshold classification") {
  CHECK(threshold_classify(VD{0.5, 0.49})[0] == 1);
  CHECK(threshold_classify(VD{0.5, 0.49})[1] == 0);
  for (auto v : threshold_classify(VD{0.0, 0.2, 1.0}, 0.0)) CHECK(v == 1);
  CHECK(accuracy(V8{1, 0, 1}, VD{0.7, 0.2, 0.1}) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("evaluation report") {
  const auto r = evaluate(V8{1, 0, 0}, VD{0.8, 0.1, 0.4});
  CHECK(r.n1 == 1);
  CHECK(r.n0 == 2);
  CHECK(r.auc == 1.0);
  CHECK(r.brier1 == doctest::Approx(0.04));
  CHECK(r.brier0 == doctest::Approx((0.01 + 0.16) / 2));
  CHECK(r.brier_gap() == doctest::Approx(0.04 - 0.085));
}

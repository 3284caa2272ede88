#include "spectral/series.hpp"

#include <doctest.h>

#include <cmath>

using namespace spectral;
using V = SeriesVerdict::Verdict;

TEST_CASE("quadratic series converges to the analytic value") {
  SeriesOptions opt;
  opt.n_max = 100000;
  auto v = analyze_series(
      "1/n^2", [](std::int64_t n) { return 1.0 / (double(n) * double(n)); },
      opt);
  CHECK(v.verdict == V::Converges);
  // pi^2/6 minus the tail 1/n_max
  CHECK(v.final_sum() == doctest::Approx(1.6449340668).epsilon(1e-4));
  CHECK(v.tail_exponent == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("harmonic series diverges") {
  auto v = analyze_series("1/n", [](std::int64_t n) { return 1.0 / double(n); });
  CHECK(v.verdict == V::Diverges);
  CHECK(v.tail_exponent == doctest::Approx(1.0).epsilon(0.02));
  CHECK(v.log_exponent == doctest::Approx(0.0).epsilon(0.1));
}

TEST_CASE("log-corrected boundary cases resolve through the second exponent") {
  auto conv = analyze_series("1/(n log^2 n)", [](std::int64_t n) {
    double l = std::log(double(n) + 2.0);
    return 1.0 / (double(n) * l * l);
  });
  CHECK(conv.verdict == V::Converges);
  auto div = analyze_series("1/(n sqrt(log n))", [](std::int64_t n) {
    return 1.0 / (double(n) * std::sqrt(std::log(double(n) + 2.0)));
  });
  CHECK(div.verdict == V::Diverges);
}

TEST_CASE("the exact log boundary is inconclusive, not guessed") {
  // 1/(n log n) sits at gamma = 1 where no finite margin can separate the
  // divergent case from a slightly faster convergent log power
  auto v = analyze_series("1/(n log n)", [](std::int64_t n) {
    return 1.0 / (double(n) * std::log(double(n) + 2.0));
  });
  CHECK(v.verdict == V::Inconclusive);
  CHECK(v.log_exponent == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("finitely supported series short-circuits to convergence") {
  auto v = analyze_series(
      "finite", [](std::int64_t n) { return n <= 50 ? 1.0 : 0.0; });
  CHECK(v.verdict == V::Converges);
  CHECK(v.final_sum() == doctest::Approx(50.0));
}

TEST_CASE("checkpoints are the half-decade grid with monotone partial sums") {
  SeriesOptions opt;
  opt.n_max = 5000;
  auto v = analyze_series(
      "1/n^2", [](std::int64_t n) { return 1.0 / (double(n) * double(n)); },
      opt);
  REQUIRE(v.checkpoints.size() >= 3);
  CHECK(v.checkpoints.front().first == 100);
  CHECK(v.checkpoints.back().first == 5000);
  for (std::size_t i = 1; i < v.checkpoints.size(); ++i) {
    CHECK(v.checkpoints[i].first > v.checkpoints[i - 1].first);
    CHECK(v.checkpoints[i].second >= v.checkpoints[i - 1].second);
  }
}

TEST_CASE("geometric decay underflows into the zero-tail branch") {
  auto v = analyze_series(
      "2^-n", [](std::int64_t n) { return std::pow(2.0, -double(n)); });
  CHECK(v.verdict == V::Converges);
  CHECK(v.final_sum() == doctest::Approx(1.0).epsilon(1e-9));
}

#include "spectral/ud.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace spectral;

TEST_CASE("sequence rules generate increasing terms with correct gap bounds") {
  auto a = SequenceSpec::arith(0, 1);
  auto p = a.prefix(5);
  CHECK(p == std::vector<std::int64_t>{1, 2, 3, 4, 5});
  CHECK(a.gap_bound() == 1);

  auto bg = SequenceSpec::bounded_gap(4, 42);
  auto q = bg.prefix(1000);
  for (std::size_t i = 1; i < q.size(); ++i) {
    CHECK(q[i] > q[i - 1]);
    CHECK(q[i] - q[i - 1] <= 4);
  }
  CHECK(bg.prefix(1000) == q);  // deterministic

  CHECK_THROWS_AS(SequenceSpec::explicit_list({3, 2}), spec_error);
  CHECK_THROWS_AS(SequenceSpec::explicit_list({0, 1}), spec_error);
}

TEST_CASE("weyl sum closed forms") {
  auto seq = SequenceSpec::arith(0, 1);
  CHECK(std::abs(weyl_sum(0.0, 1, seq, 50) - cplx(1.0)) < 1e-13);
  CHECK(std::abs(weyl_sum(0.25, 1, seq, 4)) < 1e-13);  // full period of i^k
  for (std::int64_t N : {5, 17, 100})
    CHECK(std::abs(weyl_sum(0.25, 1, seq, N)) <=
          std::sqrt(2.0) / static_cast<double>(N) + 1e-12);
  CHECK(std::abs(weyl_sum(0.25, 4, seq, 100) - cplx(1.0)) < 1e-12);
  CHECK_THROWS_AS(weyl_sum(0.1, 0, seq, 10), spec_error);
}

TEST_CASE("star discrepancy exact values and bounds") {
  CHECK(discrepancy({0.0, 0.25, 0.5, 0.75}) == doctest::Approx(0.25));
  CHECK(discrepancy({0.9, 0.9, 0.9}) == doctest::Approx(0.9));
  CHECK(discrepancy({0.5}) == doctest::Approx(0.5));
  // uniform grid shifted to midpoints attains the 1/(2N) lower bound
  std::vector<double> mid;
  for (int i = 0; i < 64; ++i) mid.push_back((i + 0.5) / 64.0);
  CHECK(discrepancy(mid) == doctest::Approx(1.0 / 128.0));
  // golden rotation is low discrepancy
  double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  std::vector<double> gold;
  for (int i = 1; i <= 4096; ++i) {
    double v = i * phi;
    gold.push_back(v - std::floor(v));
  }
  CHECK(discrepancy(gold) < 10.0 * std::log(4096.0) / 4096.0);
}

TEST_CASE("difference multiplicity never exceeds N") {
  for (std::uint64_t seed : {1ull, 9ull, 33ull}) {
    auto bg = SequenceSpec::bounded_gap(7, seed);
    std::int64_t N = 60;
    auto v = max_difference_multiplicity(bg, N);
    CHECK(v <= N);
    CHECK(v >= 1);
  }
  CHECK(max_difference_multiplicity(SequenceSpec::arith(0, 1), 50) == 49);
}

TEST_CASE("del series analytic cases") {
  auto seq = SequenceSpec::arith(0, 1);
  auto leb = del_series(*SpectralMeasure::lebesgue(), seq, 1, 3000);
  CHECK(leb.verdict.verdict == SeriesVerdict::Verdict::Converges);
  CHECK(leb.final_sum ==
        doctest::Approx(std::numbers::pi * std::numbers::pi / 6.0).epsilon(1e-3));
  CHECK(leb.max_imag <= 1e-12);

  auto dir = del_series(*SpectralMeasure::dirac(0.0), seq, 1, 2000);
  CHECK(dir.verdict.verdict == SeriesVerdict::Verdict::Diverges);

  // partial sums are nonnegative and nondecreasing
  for (std::size_t i = 1; i < leb.verdict.checkpoints.size(); ++i)
    CHECK(leb.verdict.checkpoints[i].second >=
          leb.verdict.checkpoints[i - 1].second - 1e-15);
}

TEST_CASE("del bound path reports the multiplicity-bound majorant") {
  auto spec = RieszSpec::geometric_freqs(4, 4.0, 20, SeqRule::inv_log(), true);
  auto m = SpectralMeasure::riesz(spec);
  auto d = del_series(*m, SequenceSpec::bounded_gap(3, 5), 1, 1000);
  CHECK(d.bound_path_valid);
  REQUIRE(!d.bound_path.empty());
  for (const auto& [N, b] : d.bound_path) CHECK(b >= 0.0);
}

TEST_CASE("sampling: determinism and per-kind invariants") {
  auto leb = SpectralMeasure::lebesgue();
  auto a = sample(*leb, 100, 9);
  auto b = sample(*leb, 100, 9);
  CHECK(a == b);
  CHECK(sample(*leb, 100, 10) != a);

  auto dir = sample(*SpectralMeasure::dirac(0.375), 10, 1);
  for (double x : dir) CHECK(x == 0.375);

  // kolmogorov-smirnov against uniform at the 1% level
  auto u = sample(*leb, 10000, 5);
  CHECK(discrepancy(u) * std::sqrt(10000.0) < 1.63);

  // cantor: ternary digits avoid 1 (exact integer reconstruction)
  auto cs = sample(*SpectralMeasure::cantor(), 2000, 3);
  for (double x : cs) {
    auto n = static_cast<long long>(std::llround(x * std::pow(3.0, 30)));
    for (int i = 0; i < 30; ++i) {
      CHECK(n % 3 != 1);
      n /= 3;
    }
  }
  CHECK_THROWS_AS(sample(*SpectralMeasure::power(leb, 2), 5, 1), spec_error);
}

TEST_CASE("riesz sampling tracks the truncated product density") {
  auto spec = RieszSpec::geometric_freqs(
      4, 4.0, 2, SeqRule::explicit_list({0.0, 0.8, 0.6}), true);
  auto m = SpectralMeasure::riesz(spec);
  auto xs = sample(*m, 40000, 13);
  // empirical first moment of cos(2 pi n_1 x) should be a_1/2
  double s = 0.0;
  for (double x : xs) s += std::cos(two_pi * 4.0 * x);
  CHECK(s / 40000.0 == doctest::Approx(0.4).epsilon(0.05));
}

TEST_CASE("convex_ac sampling matches its density moments") {
  ConvexSeq seq;
  seq.start = 0;
  seq.rule = SeqRule::power_law(2.0);
  auto m = SpectralMeasure::convex_ac(seq);
  auto xs = sample(*m, 60000, 21);
  double s = 0.0;
  for (double x : xs) s += std::cos(two_pi * x);
  // E cos(2 pi x) = nuhat(1).real (for an even real density)
  CHECK(s / 60000.0 ==
        doctest::Approx(m->coefficient(1).real()).epsilon(0.08));
}

TEST_CASE("ud experiment summarizes pass rates against thresholds") {
  auto seq = SequenceSpec::arith(0, 1);
  auto rep = ud_experiment(*SpectralMeasure::lebesgue(), seq, 40, 20000, {1, 2}, 3);
  CHECK(rep.pass_fraction > 0.85);
  CHECK(rep.weyl_quantiles.size() == 6);
  CHECK(std::is_sorted(rep.weyl_quantiles.begin(), rep.weyl_quantiles.end()));
  auto bad = ud_experiment(*SpectralMeasure::dirac(0.0), seq, 20, 20000, {1}, 3);
  CHECK(bad.pass_fraction == 0.0);
}

#include "spectral/measures.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace spectral;

namespace {

RieszSpec small_riesz(bool finite = true) {
  return RieszSpec::geometric_freqs(
      4, 4.0, 5,
      SeqRule::explicit_list({0.0, 0.9, -0.5, 0.3, 0.8, -0.2}),  // a(k), k>=1
      finite);
}

// independent Cantor oracle: nuhat(n) = prod_k (1 + e(-2n/3^k)) / 2 over the
// digit expansion, cut when the remaining factors are within 1e-15 of 1
cplx cantor_oracle(std::int64_t n) {
  cplx prod = 1.0;
  double base = -2.0 * static_cast<double>(n);
  double scale = 1.0;
  for (int k = 1; k <= 120; ++k) {
    scale /= 3.0;
    double arg = base * scale;
    if (std::abs(two_pi * arg) < 1e-13) break;
    prod *= 0.5 * (1.0 + e(arg - std::floor(arg)));
  }
  return prod;
}

}  // namespace

TEST_CASE("riesz coefficients match the exhaustive epsilon enumeration") {
  auto spec = small_riesz();
  auto m = SpectralMeasure::riesz(spec);
  int pow3 = 243;  // 3^5
  for (int code = 0; code < pow3; ++code) {
    int c = code;
    std::int64_t freq = 0;
    double expected = 1.0;
    for (std::size_t j = 0; j < 5; ++j) {
      int eps = c % 3 - 1;
      c /= 3;
      freq += eps * spec.freqs[j];
      if (eps != 0) expected *= spec.a(j + 1) / 2.0;
    }
    CHECK(std::abs(m->coefficient(freq) - cplx(expected)) < 1e-15);
  }
}

TEST_CASE("riesz decomposition round-trips and rejects non-representable m") {
  auto spec = small_riesz();
  auto dec = riesz_decompose(spec, 4 - 64 + 1024);
  REQUIRE(dec.has_value());
  CHECK((*dec)[0] == 1);
  CHECK((*dec)[2] == -1);
  CHECK((*dec)[4] == 1);
  CHECK(!riesz_decompose(spec, 2).has_value());
  CHECK(!riesz_decompose(spec, 4 + 1).has_value());
}

TEST_CASE("riesz coefficient magnitudes stay at or below 1/2 off zero") {
  auto m = SpectralMeasure::riesz(small_riesz());
  for (std::int64_t n = 1; n <= 1500; ++n)
    CHECK(std::abs(m->coefficient(n)) <= 0.5 + 1e-15);
  CHECK(m->coefficient(0) == cplx(1.0));
}

TEST_CASE("non-finite riesz throws past the representable bound") {
  auto m = SpectralMeasure::riesz(small_riesz(false));
  auto bound = small_riesz().representable_bound();
  CHECK_NOTHROW(m->coefficient(bound));
  CHECK_THROWS_AS(m->coefficient(bound + 1), std::out_of_range);
  auto fin = SpectralMeasure::riesz(small_riesz(true));
  CHECK(fin->coefficient(bound + 1) == cplx(0.0));
}

TEST_CASE("riesz rejects lacunarity at or below 3 and zero coefficients") {
  CHECK_THROWS_AS(RieszSpec::geometric_freqs(2, 3.0, 4, SeqRule::inv_log()),
                  spec_error);
  CHECK_THROWS_AS(RieszSpec::geometric_freqs(
                      2, 4.0, 3, SeqRule::explicit_list({0.0, 0.5, 0.0, 0.5})),
                  spec_error);
}

TEST_CASE("inverse-log riesz coefficients make every convolution power singular") {
  auto spec = RieszSpec::geometric_freqs(4, 4.0, 30, SeqRule::inv_log(), true);
  for (int k : {1, 2, 5}) {
    auto v = power_singularity_check(spec, k, 100000);
    CHECK(v.verdict == SeriesVerdict::Verdict::Diverges);
  }
  auto geo = RieszSpec::geometric_freqs(4, 4.0, 30, SeqRule::geometric(0.5), true);
  CHECK(power_singularity_check(geo, 1, 100000).verdict ==
        SeriesVerdict::Verdict::Converges);
}

TEST_CASE("cantor coefficients match the digit-product oracle") {
  auto m = SpectralMeasure::cantor();
  for (std::int64_t n = -100; n <= 100; ++n)
    CHECK(std::abs(m->coefficient(n) - cantor_oracle(n)) < 1e-11);
}

TEST_CASE("cantor self-similarity nuhat(3n) = nuhat(n)") {
  auto m = SpectralMeasure::cantor();
  for (std::int64_t n = -300; n <= 300; ++n)
    CHECK(std::abs(m->coefficient(3 * n) - m->coefficient(n)) < 1e-13);
}

TEST_CASE("coefficients are hermitian across all kinds") {
  std::vector<MeasurePtr> ms = {
      SpectralMeasure::cantor(),
      SpectralMeasure::dirac(0.3),
      SpectralMeasure::lebesgue(),
      SpectralMeasure::riesz(small_riesz()),
      SpectralMeasure::convolution(SpectralMeasure::cantor(),
                                   SpectralMeasure::dirac(0.7)),
      SpectralMeasure::power(SpectralMeasure::cantor(), 3),
      SpectralMeasure::mixture({0.25, 0.75}, {SpectralMeasure::dirac(0.1),
                                              SpectralMeasure::lebesgue()}),
      SpectralMeasure::reflected(SpectralMeasure::dirac(0.3)),
  };
  for (const auto& m : ms) {
    CHECK(std::abs(m->coefficient(0) - cplx(1.0)) < 1e-12);
    for (std::int64_t n : {1, 2, 7, 19, 100})
      CHECK(std::abs(m->coefficient(-n) - std::conj(m->coefficient(n))) < 1e-13);
  }
}

TEST_CASE("composite coefficient algebra") {
  auto c = SpectralMeasure::cantor();
  auto d = SpectralMeasure::dirac(0.3);
  auto conv = SpectralMeasure::convolution(c, d);
  auto pw = SpectralMeasure::power(c, 4);
  auto refl = SpectralMeasure::reflected(d);
  auto mix = SpectralMeasure::mixture({0.5, 0.5}, {c, d});
  for (std::int64_t n : {-11, -2, 0, 1, 5, 40}) {
    CHECK(std::abs(conv->coefficient(n) -
                   c->coefficient(n) * d->coefficient(n)) < 1e-14);
    CHECK(std::abs(pw->coefficient(n) - std::pow(c->coefficient(n), 4)) < 1e-14);
    CHECK(std::abs(refl->coefficient(n) - std::conj(d->coefficient(n))) < 1e-14);
    CHECK(std::abs(mix->coefficient(n) -
                   (0.5 * c->coefficient(n) + 0.5 * d->coefficient(n))) < 1e-14);
  }
}

TEST_CASE("dirac coefficients are unimodular characters") {
  auto d = SpectralMeasure::dirac(0.3);
  for (std::int64_t n = -20; n <= 20; ++n)
    CHECK(std::abs(d->coefficient(n) - e(-0.3 * static_cast<double>(n))) < 1e-14);
}

TEST_CASE("convex_ac normalizes to a probability measure") {
  ConvexSeq seq;
  seq.start = 0;
  seq.rule = SeqRule::inv_log();
  auto m = SpectralMeasure::convex_ac(seq);
  double T = m->convex_total_mass();
  CHECK(T == doctest::Approx(1.0 / std::log(2.0)));  // a_0, no head
  CHECK(m->coefficient(0) == cplx(1.0));
  for (std::int64_t n : {1, 10, 1000})
    CHECK(m->coefficient(n).real() ==
          doctest::Approx(seq.a(n) / (2.0 * T)).epsilon(1e-12));
}

TEST_CASE("convex_ac with a positive start zeroes the low frequencies") {
  ConvexSeq seq;
  seq.start = 8;
  seq.rule = SeqRule::power_law(1.5);
  auto m = SpectralMeasure::convex_ac(seq);
  for (std::int64_t n = 1; n < 8; ++n) CHECK(m->coefficient(n) == cplx(0.0));
  CHECK(std::abs(m->coefficient(8)) > 0.0);
  CHECK(m->convex_shift() > 0.0);
}

TEST_CASE("convexity violations are rejected") {
  ConvexSeq bad;
  bad.start = 0;
  // concave near the head: violates the second-difference condition
  bad.rule = SeqRule::explicit_list(
      {1.0, 0.99, 0.5, 0.4},
      std::make_shared<SeqRule>(SeqRule::geometric(0.9)));
  CHECK_THROWS_AS(SpectralMeasure::convex_ac(bad), spec_error);
}

TEST_CASE("coefficient memoization is transparent") {
  auto m = SpectralMeasure::cantor();
  auto a = m->coefficient(1234);
  auto b = m->coefficient(1234);
  CHECK(a == b);
}

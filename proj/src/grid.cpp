#include "spectral/grid.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <random>

namespace spectral {

namespace {

std::int64_t next_pow2(std::int64_t v) {
  std::int64_t m = 1;
  while (m < v) m <<= 1;
  return m;
}

void fft_forward(std::vector<cplx>& data) {
  Eigen::FFT<double> fft;
  std::vector<cplx> out(data.size());
  fft.fwd(out, data);
  data.swap(out);
}

void fft_inverse(std::vector<cplx>& data) {
  Eigen::FFT<double> fft;
  std::vector<cplx> out(data.size());
  fft.inv(out, data);
  data.swap(out);
}

}  // namespace

GridFunction GridFunction::from_coeffs(std::vector<cplx> coeffs,
                                       std::int64_t M) {
  if (coeffs.size() % 2 == 0 || coeffs.empty())
    throw spec_error("GridFunction: coefficient vector must have odd size");
  GridFunction g;
  g.N_ = static_cast<std::int64_t>(coeffs.size() / 2);
  g.M_ = next_pow2(std::max<std::int64_t>(M, std::max<std::int64_t>(
                                                 8 * g.N_, 2 * g.N_ + 2)));
  g.coeffs_ = std::move(coeffs);
  g.coeffs_authoritative_ = true;
  g.fill_samples();
  return g;
}

GridFunction GridFunction::from_samples(std::vector<cplx> samples,
                                        std::int64_t degree) {
  auto M = static_cast<std::int64_t>(samples.size());
  if (M < 2 * degree + 1)
    throw spec_error("GridFunction: grid must have at least 2N+1 points");
  if ((M & (M - 1)) != 0)
    throw spec_error("GridFunction: grid size must be a power of two");
  GridFunction g;
  g.N_ = degree;
  g.M_ = M;
  g.samples_ = std::move(samples);
  g.coeffs_authoritative_ = false;
  g.fill_coeffs();
  return g;
}

void GridFunction::fill_samples() {
  std::vector<cplx> buf(static_cast<std::size_t>(M_), 0.0);
  for (std::int64_t n = -N_; n <= N_; ++n)
    buf[static_cast<std::size_t>(((n % M_) + M_) % M_)] +=
        coeffs_[static_cast<std::size_t>(n + N_)];
  // f(x_i) = sum_m buf[m] e(m i / M) = M * ifft(buf)[i]
  fft_inverse(buf);
  for (auto& v : buf) v *= static_cast<double>(M_);
  samples_ = std::move(buf);
}

void GridFunction::fill_coeffs() {
  std::vector<cplx> buf = samples_;
  fft_forward(buf);
  coeffs_.assign(static_cast<std::size_t>(2 * N_ + 1), 0.0);
  for (std::int64_t n = -N_; n <= N_; ++n)
    coeffs_[static_cast<std::size_t>(n + N_)] =
        buf[static_cast<std::size_t>(((n % M_) + M_) % M_)] /
        static_cast<double>(M_);
}

cplx GridFunction::coeff(std::int64_t n) const {
  if (std::llabs(n) > N_) return 0.0;
  return coeffs_[static_cast<std::size_t>(n + N_)];
}

double GridFunction::norm(double p) const {
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& v : samples_) m = std::max(m, std::abs(v));
    return m;
  }
  if (p == 2.0) {  // Parseval is exact for band-limited functions
    double s = 0.0;
    for (const auto& c : coeffs_) s += std::norm(c);
    return std::sqrt(s);
  }
  double s = 0.0;
  for (const auto& v : samples_) s += std::pow(std::abs(v), p);
  return std::pow(s / static_cast<double>(M_), 1.0 / p);
}

GridFunction apply_multiplier(const SpectralMeasure& m, const GridFunction& f) {
  std::vector<cplx> c(f.coeffs().size());
  std::int64_t N = f.degree();
  for (std::int64_t n = -N; n <= N; ++n)
    c[static_cast<std::size_t>(n + N)] = m.coefficient(n) * f.coeff(n);
  return GridFunction::from_coeffs(std::move(c), f.grid_size());
}

GridFunction dirichlet(std::int64_t N) {
  std::vector<cplx> c(static_cast<std::size_t>(2 * N + 1), 1.0);
  return GridFunction::from_coeffs(std::move(c));
}

GridFunction fejer(std::int64_t N) {
  std::vector<cplx> c(static_cast<std::size_t>(2 * N + 1));
  for (std::int64_t n = -N; n <= N; ++n)
    c[static_cast<std::size_t>(n + N)] =
        1.0 - std::abs(static_cast<double>(n)) / (static_cast<double>(N) + 1.0);
  return GridFunction::from_coeffs(std::move(c));
}

double dirichlet_norm(std::int64_t N, double p) {
  if (N < 1) throw spec_error("dirichlet_norm: N must be >= 1");
  if (!(p >= 1.0)) throw spec_error("dirichlet_norm: p must be >= 1");
  if (std::isinf(p)) return static_cast<double>(2 * N + 1);  // peak at x = 0
  // closed form D_N(x) = sin((2N+1) pi x) / sin(pi x) on a >= 64 N grid
  std::int64_t M = next_pow2(64 * N);
  double s = 0.0;
  for (std::int64_t i = 0; i < M; ++i) {
    double x = static_cast<double>(i) / static_cast<double>(M);
    double den = std::sin(std::numbers::pi * x);
    double v = den == 0.0 ? static_cast<double>(2 * N + 1)
                          : std::sin((2.0 * N + 1.0) * std::numbers::pi * x) / den;
    s += std::pow(std::abs(v), p);
  }
  return std::pow(s / static_cast<double>(M), 1.0 / p);
}

ConvexBuild build_nonneg_from_convex(const ConvexSeq& c, std::int64_t N_trunc,
                                     std::int64_t M) {
  c.validate();
  if (N_trunc <= c.start)
    throw spec_error("build_nonneg_from_convex: truncation below start");
  ConvexBuild out;
  // C = sup |sum_{n<start} ext_a(n) cos(2 pi n x)| (0 for start == 0)
  double C = 0.0;
  if (c.start > 0) {
    std::int64_t Mh = next_pow2(std::max<std::int64_t>(1024, 8 * c.start));
    for (std::int64_t i = 0; i < Mh; ++i) {
      double x = static_cast<double>(i) / static_cast<double>(Mh);
      double s = 0.0;
      for (std::int64_t n = 0; n < c.start; ++n)
        s += c.extended(n) * std::cos(two_pi * n * x);
      C = std::max(C, std::abs(s));
    }
  }
  out.C = C;

  // s(x) = sum_{n<=T} (n+1) d2_n K_n(x) with d2_n = b_n - 2b_{n+1} + b_{n+2}
  // >= 0 and K_n the Fejer kernel: a nonnegative polynomial whose
  // coefficients converge to b_k from below as T grows.  Its e(kx)
  // coefficient is sum_{n>=k} (n+1-k) d2_n, computed via suffix sums.
  const std::int64_t T = N_trunc;
  std::vector<double> d2(static_cast<std::size_t>(T + 1));
  auto b = [&c](std::int64_t n) { return c.extended(n); };
  for (std::int64_t n = 0; n <= T; ++n)
    d2[static_cast<std::size_t>(n)] = b(n) - 2.0 * b(n + 1) + b(n + 2);
  std::vector<double> S0(static_cast<std::size_t>(T + 2), 0.0);
  std::vector<double> S1(static_cast<std::size_t>(T + 2), 0.0);
  for (std::int64_t n = T; n >= 0; --n) {
    S0[static_cast<std::size_t>(n)] =
        S0[static_cast<std::size_t>(n + 1)] + d2[static_cast<std::size_t>(n)];
    S1[static_cast<std::size_t>(n)] = S1[static_cast<std::size_t>(n + 1)] +
                                      static_cast<double>(n + 1) *
                                          d2[static_cast<std::size_t>(n)];
  }
  auto s_coeff = [&](std::int64_t k) {
    return S1[static_cast<std::size_t>(k)] -
           static_cast<double>(k) * S0[static_cast<std::size_t>(k)];
  };

  // s has e(kx) coefficient ~ b_k, i.e. s = b_0 + 2 sum_{k>=1} b_k cos,
  // so the density is s/2 + (C + b_0/2 - head); both summands are
  // pointwise nonnegative since C >= sup |head|
  std::vector<cplx> coeffs(static_cast<std::size_t>(2 * T + 1), 0.0);
  coeffs[static_cast<std::size_t>(T)] =
      s_coeff(0) / 2.0 + b(0) / 2.0 + C - (c.start > 0 ? b(0) : 0.0);
  for (std::int64_t k = 1; k <= T; ++k) {
    double v = s_coeff(k) - (k < c.start ? b(k) : 0.0);
    coeffs[static_cast<std::size_t>(T + k)] = v / 2.0;
    coeffs[static_cast<std::size_t>(T - k)] = v / 2.0;
  }
  out.f = GridFunction::from_coeffs(std::move(coeffs), M);
  out.total_mass = out.f.coeff(0).real();
  double mn = out.f.samples().front().real();
  for (const auto& v : out.f.samples()) mn = std::min(mn, v.real());
  out.grid_min = mn;
  return out;
}

ProductPair product_pair(std::int64_t degree) {
  if (degree < 8) throw spec_error("product_pair: degree too small");
  ProductPair out;
  out.degree = degree;

  // h(x) = sum_{k>=1} cos(2 pi (2k+1) x)/log(2k+1): odd frequencies >= 3
  // f(2x) = sum_{n>=1} cos(2 pi (2n) x)/log(2n):   even frequencies >= 2
  // In both cases the coefficient at frequency m is 1/(2 log m).
  auto grid_min = [degree](bool odd) {
    std::vector<cplx> c(static_cast<std::size_t>(2 * degree + 1), 0.0);
    for (std::int64_t m = 2; m <= degree; ++m) {
      if ((m % 2 == 1) != odd) continue;
      double v = 0.5 / std::log(static_cast<double>(m));
      c[static_cast<std::size_t>(degree + m)] = v;
      c[static_cast<std::size_t>(degree - m)] = v;
    }
    auto g = GridFunction::from_coeffs(std::move(c));
    double mn = g.samples().front().real();
    for (const auto& v : g.samples()) mn = std::min(mn, v.real());
    return mn;
  };

  double m1 = grid_min(true);
  double m2 = grid_min(false);
  // grid supremum of the negative part + 1% safety margin
  out.C1 = 1.01 * std::max(0.0, -m1);
  out.C2 = 1.01 * std::max(0.0, -m2);
  if (out.C1 <= 0.0 || out.C2 <= 0.0)
    throw invariant_error("product_pair: degenerate constant shift");
  out.min1 = m1 + out.C1;
  out.min2 = m2 + out.C2;
  if (out.min1 < -1e-12 || out.min2 < -1e-12)
    throw invariant_error("product_pair: density negative after shift");

  double C1 = out.C1, C2 = out.C2;
  out.nu1 = SpectralMeasure::cosine_ac(
      [C1, degree](std::int64_t n) {
        if (n % 2 == 0 || n < 3 || n > degree) return 0.0;
        return 1.0 / (2.0 * C1 * std::log(static_cast<double>(n)));
      },
      "product_pair_nu1");
  out.nu2 = SpectralMeasure::cosine_ac(
      [C2, degree](std::int64_t n) {
        if (n % 2 != 0 || n < 2 || n > degree) return 0.0;
        return 1.0 / (2.0 * C2 * std::log(static_cast<double>(n)));
      },
      "product_pair_nu2");
  return out;
}

ErgodicityCheck uniform_ergodicity_check(const SpectralMeasure& m,
                                         std::int64_t N) {
  if (N < 1) throw spec_error("uniform_ergodicity_check: N must be >= 1");
  ErgodicityCheck out;
  out.N = N;
  out.margin = 1e300;
  for (std::int64_t n = 1; n <= N; ++n) {
    for (std::int64_t sn : {n, -n}) {
      double d = std::abs(m.coefficient(sn) - 1.0);
      if (d < out.margin) {
        out.margin = d;
        out.argmin = sn;
      }
    }
  }
  out.uniformly_ergodic = out.margin > 1e-9;
  return out;
}

NormLB multiplier_norm_lower_bound(const SpectralMeasure& m, double p, double q,
                                   std::int64_t N, std::uint64_t seed) {
  if (!(p >= 1.0 && p < q && std::isfinite(q)))
    throw spec_error("multiplier_norm_lower_bound: need 1 <= p < q < inf");
  NormLB out;

  auto consider = [&](const GridFunction& g, const std::string& tag,
                      std::int64_t a, std::int64_t b, std::int64_t M) {
    double np = g.norm(p);
    if (np <= 0.0) return;
    double ratio = apply_multiplier(m, g).norm(q) / np;
    if (ratio > out.value) {
      out.value = ratio;
      out.witness = tag;
      out.best_a = a;
      out.best_b = b;
      out.best_M = M;
    }
  };

  for (std::int64_t M : {N / 4, N / 2, N}) {
    if (M < 1) continue;
    for (std::int64_t a : {0, 1, 2, 4, 8}) {
      for (std::int64_t b : {1, 2, 3, 4}) {
        std::int64_t deg = a + b * M;
        std::vector<cplx> c(static_cast<std::size_t>(2 * deg + 1), 0.0);
        for (std::int64_t k = -M; k <= M; ++k)
          c[static_cast<std::size_t>(deg + a + b * k)] = 1.0;
        consider(GridFunction::from_coeffs(std::move(c)),
                 "e(ax) D_M(bx), a=" + std::to_string(a) +
                     ", b=" + std::to_string(b) + ", M=" + std::to_string(M),
                 a, b, M);
      }
    }
  }

  std::mt19937_64 rng(seed);
  for (int trial = 0; trial < 8; ++trial) {
    std::vector<cplx> c(static_cast<std::size_t>(2 * N + 1));
    for (auto& v : c) {
      double re = 2.0 * u01(rng) - 1.0, im = 2.0 * u01(rng) - 1.0;
      v = {re, im};
    }
    consider(GridFunction::from_coeffs(std::move(c)),
             "random trigonometric polynomial #" + std::to_string(trial), 0, 1,
             N);
  }
  return out;
}

}  // namespace spectral

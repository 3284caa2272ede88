#include "spectral/criteria.hpp"

#include "spectral/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace spectral {

const char* to_string(Classification::Overall o) {
  switch (o) {
    case Classification::Overall::NotHyperbounded: return "NotHyperbounded";
    case Classification::Overall::Hyperbounded: return "Hyperbounded";
    default: return "Inconclusive";
  }
}

double wiener_average(const SpectralMeasure& m, std::int64_t N) {
  if (N < 1) throw spec_error("wiener_average: N must be >= 1");
  double s = 1.0;  // n = 0
  for (std::int64_t n = 1; n <= N; ++n)
    s += 2.0 * std::norm(m.coefficient(n));  // hermitian pairing +-n
  return s / static_cast<double>(2 * N + 1);
}

SeriesVerdict ht_series(const SpectralMeasure& m, std::int64_t N) {
  if (N < 2) throw spec_error("ht_series: N must be >= 2");
  SeriesOptions opt;
  opt.n_max = N;
  const SpectralMeasure* mp = &m;
  return analyze_series(
      "sum_{n!=0} |nuhat(n)|^2/|n|",
      [mp](std::int64_t n) {
        return 2.0 * std::norm(mp->coefficient(n)) / static_cast<double>(n);
      },
      opt);
}

SeriesVerdict hr_series(const SpectralMeasure& m, double p, double eps,
                        std::int64_t N) {
  if (!(p > 1.0 && p < 2.0)) throw spec_error("hr_series: p must be in (1,2)");
  if (!(eps > 0.0)) throw spec_error("hr_series: eps must be positive");
  SeriesOptions opt;
  opt.n_max = N;
  const SpectralMeasure* mp = &m;
  double expo = 2.0 * (p - 1.0) / p;
  return analyze_series(
      "sum_{n!=0} |nuhat(n)|^2 / (n^{2(p-1)/p} log^{1+eps}(1+n)), p=" +
          std::to_string(p),
      [mp, expo, eps](std::int64_t n) {
        double nn = static_cast<double>(n);
        return 2.0 * std::norm(mp->coefficient(n)) /
               (std::pow(nn, expo) * std::pow(std::log1p(nn), 1.0 + eps));
      },
      opt);
}

AlphaResult alpha_summability(const SpectralMeasure& m, double alpha,
                              std::int64_t N) {
  if (!(alpha > 0.0)) throw spec_error("alpha_summability: alpha must be > 0");
  AlphaResult out;
  out.alpha = alpha;
  out.implied_p = std::max(1.0, 2.0 * alpha / (alpha + 2.0));
  SeriesOptions opt;
  opt.n_max = N;
  const SpectralMeasure* mp = &m;
  out.verdict = analyze_series(
      "sum_{n!=0} |nuhat(n)|^alpha, alpha=" + std::to_string(alpha),
      [mp, alpha](std::int64_t n) {
        return 2.0 * std::pow(std::abs(mp->coefficient(n)), alpha);
      },
      opt);
  return out;
}

WindowReport window_bound_check(const SpectralMeasure& m, double p, double q,
                                double norm_cap, std::int64_t a, std::int64_t b,
                                std::int64_t N) {
  if (!(p >= 1.0 && p < q)) throw spec_error("window_bound_check: need 1<=p<q");
  if (!(norm_cap >= 1.0))
    throw spec_error("window_bound_check: norm_cap must be >= 1");
  if (b < 1) throw spec_error("window_bound_check: b must be >= 1");
  WindowReport rep;
  rep.p = p;
  rep.q = q;
  rep.norm_cap = norm_cap;
  rep.a = a;
  rep.b = b;
  rep.r = q / (q - 1.0);

  // Dirichlet test-function constant, observed supremum over a small range
  double kernel_p = p < 2.0 ? p : q / (q - 1.0);
  double C = 1.0;
  for (std::int64_t K : {16, 64, 256, 1024})
    C = std::max(C, dirichlet_norm(K, kernel_p) /
                        std::pow(static_cast<double>(K),
                                 (kernel_p - 1.0) / kernel_p));
  rep.C_test = C;
  rep.note = p < 2.0
                 ? "bound branch for 1<=p<2, q<=2 window inequality"
                 : "bound branch for p>=2 window inequality";

  std::vector<std::int64_t> grid;
  for (std::int64_t n = 8; n < N; n *= 2) grid.push_back(n);
  grid.push_back(N);

  double lhs = std::norm(m.coefficient(a));
  double lhs_r = std::pow(std::abs(m.coefficient(0)), rep.r);
  std::int64_t covered = 0, covered_r = 0;
  for (auto Nw : grid) {
    for (std::int64_t n = covered + 1; n <= Nw; ++n)
      lhs += std::norm(m.coefficient(a + b * n)) +
             std::norm(m.coefficient(a - b * n));
    covered = Nw;
    double dN = static_cast<double>(Nw);
    double rhs;
    if (p < 2.0)
      rhs = C * C * norm_cap * norm_cap * std::pow(dN, 2.0 * (p - 1.0) / p) *
            std::pow(2.0 * dN + 1.0, (2.0 - q) / q);
    else
      rhs = C * C * norm_cap * norm_cap * std::pow(dN, 2.0 / q) *
            std::pow(2.0 * dN + 1.0, (p - 2.0) / p);
    WindowCheck wc{Nw, lhs, rhs, lhs > rhs};
    rep.any_violation = rep.any_violation || wc.violated;
    rep.sum_checks.push_back(wc);

    for (std::int64_t n = covered_r + 1; n <= Nw; ++n)
      lhs_r += 2.0 * std::pow(std::abs(m.coefficient(n)), rep.r);
    covered_r = Nw;
    double ratio = lhs_r / std::pow(dN, (p - 1.0) * rep.r / p);
    rep.rpower_ratio.emplace_back(Nw, ratio);
    rep.K_observed = std::max(rep.K_observed, ratio);
  }
  if (rep.rpower_ratio.size() >= 2)
    rep.rpower_growing =
        rep.rpower_ratio.back().second > 2.0 * rep.rpower_ratio.front().second;
  return rep;
}

KornerResult korner_condition(const SpectralMeasure& m, std::int64_t N) {
  if (N < 2) throw spec_error("korner_condition: N must be >= 2");
  KornerResult out;
  std::vector<double> s(static_cast<std::size_t>(2 * N + 1), 0.0);
  std::vector<double> prefix(s.size() + 1, 0.0);
  for (std::int64_t k = 1; k <= 2 * N; ++k) {
    s[static_cast<std::size_t>(k)] = std::norm(m.coefficient(k));
    prefix[static_cast<std::size_t>(k) + 1] =
        prefix[static_cast<std::size_t>(k)] + s[static_cast<std::size_t>(k)];
  }
  for (std::int64_t n = 1; n <= N; ++n) {
    double num = s[static_cast<std::size_t>(n)];
    if (num == 0.0) continue;
    double window =
        (prefix[static_cast<std::size_t>(2 * n) + 1] -
         prefix[static_cast<std::size_t>(n) + 1]) /
        static_cast<double>(n);
    if (window <= 0.0) {
      out.C = std::numeric_limits<double>::infinity();
      out.finite = false;
      out.worst_n = n;
      out.note = "empty coefficient window with nonzero left side";
      break;
    }
    double ratio = num / window;
    if (ratio > out.C) {
      out.C = ratio;
      out.worst_n = n;
    }
  }
  // observed decay exponent of |nuhat(n)|^2 over the last decade
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::int64_t cnt = 0;
  for (std::int64_t n = std::max<std::int64_t>(2, N / 10); n <= N;
       n = std::max(n + 1, n + n / 128)) {
    double v = s[static_cast<std::size_t>(n)];
    if (v <= 0.0) continue;
    double lx = std::log(static_cast<double>(n)), ly = std::log(v);
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    ++cnt;
  }
  if (cnt >= 4) {
    double det = static_cast<double>(cnt) * sxx - sx * sx;
    if (det > 0) out.decay_exponent = -(static_cast<double>(cnt) * sxy - sx * sy) / det;
  }
  if (out.note.empty())
    out.note = "C is the observed supremum over 1 <= n <= N";
  return out;
}

std::optional<int> harris_power_check(const SpectralMeasure& m, int k_max,
                                      std::int64_t N) {
  if (k_max < 1) throw spec_error("harris_power_check: k_max must be >= 1");
  for (int k = 1; k <= k_max; ++k) {
    SeriesOptions opt;
    opt.n_max = N;
    const SpectralMeasure* mp = &m;
    auto v = analyze_series(
        "sum |nuhat|^(2k)",
        [mp, k](std::int64_t n) {
          return 2.0 * std::pow(std::norm(mp->coefficient(n)), k);
        },
        opt);
    if (v.verdict == SeriesVerdict::Verdict::Converges) return k;
  }
  return std::nullopt;
}

Classification classify(const SpectralMeasure& m, ClassifyOptions opt) {
  Classification c;
  c.wiener_value = wiener_average(m, opt.N);
  double w_small = wiener_average(m, std::max<std::int64_t>(1, opt.N / 64));
  c.wiener_trend = w_small > 0 ? c.wiener_value / w_small : 0.0;
  c.has_atoms = c.wiener_value > opt.atom_threshold && c.wiener_trend > 0.8;

  for (std::int64_t n = std::max<std::int64_t>(1, opt.N / 10); n <= opt.N;
       n = std::max(n + 1, n + n / 256))
    c.max_tail_coeff = std::max(c.max_tail_coeff, std::abs(m.coefficient(n)));
  c.rajchman = c.max_tail_coeff < 0.05;

  c.ht = ht_series(m, opt.N);
  for (double p : opt.p_list) c.hr.emplace_back(p, hr_series(m, p, opt.eps, opt.N));
  for (double alpha : opt.alpha_list)
    c.alpha.push_back(alpha_summability(m, alpha, opt.N));
  c.korner = korner_condition(m, opt.N / 2);
  c.korner_ok = c.korner.finite;
  c.harris_power = harris_power_check(m, opt.harris_kmax, opt.N);

  using V = SeriesVerdict::Verdict;
  using O = Classification::Overall;
  if (c.has_atoms) {
    c.overall = O::NotHyperbounded;
    c.witness = "atoms: Wiener average " + std::to_string(c.wiener_value) +
                " at N=" + std::to_string(opt.N);
  } else if (c.ht.verdict == V::Diverges) {
    c.overall = O::NotHyperbounded;
    c.witness = "(HT) series diverges";
  } else {
    for (const auto& [p, v] : c.hr)
      if (v.verdict == V::Diverges) {
        c.overall = O::NotHyperbounded;
        c.witness = "(hr) series diverges at p=" + std::to_string(p);
        break;
      }
    if (c.overall == O::Inconclusive) {
      for (const auto& ar : c.alpha)
        if (ar.verdict.verdict == V::Converges) {
          c.overall = O::Hyperbounded;
          c.witness = "alpha=" + std::to_string(ar.alpha) +
                      " summable: maps L^p to L^2 with p=" +
                      std::to_string(ar.implied_p);
          break;
        }
    }
  }
  c.note =
      "sufficient conditions are not exhaustive; Inconclusive is a valid "
      "outcome and raw partial sums are reported for human review";
  return c;
}

}  // namespace spectral

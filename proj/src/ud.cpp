#include "spectral/ud.hpp"

#include "spectral/grid.hpp"

#include <algorithm>
#include <cmath>

namespace spectral {

SequenceSpec SequenceSpec::arith(std::int64_t a, std::int64_t b) {
  SequenceSpec s;
  s.kind = Kind::Arith;
  s.a = a;
  s.b = b;
  if (b < 1 || a + b < 1)
    throw spec_error("sequence: arithmetic rule must produce positive terms");
  return s;
}

SequenceSpec SequenceSpec::explicit_list(std::vector<std::int64_t> v) {
  SequenceSpec s;
  s.kind = Kind::Explicit;
  s.values = std::move(v);
  for (std::size_t i = 0; i < s.values.size(); ++i)
    if (s.values[i] < 1 || (i > 0 && s.values[i] <= s.values[i - 1]))
      throw spec_error("sequence: terms must be strictly increasing positive");
  return s;
}

SequenceSpec SequenceSpec::bounded_gap(std::int64_t d, std::uint64_t seed) {
  if (d < 1) throw spec_error("sequence: gap bound must be >= 1");
  SequenceSpec s;
  s.kind = Kind::BoundedGap;
  s.gap = d;
  s.seed = seed;
  return s;
}

std::vector<std::int64_t> SequenceSpec::prefix(std::int64_t N) const {
  if (N < 1) throw spec_error("sequence: N must be >= 1");
  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(N));
  switch (kind) {
    case Kind::Explicit:
      if (N > static_cast<std::int64_t>(values.size()))
        throw spec_error("sequence: explicit list shorter than N");
      out.assign(values.begin(), values.begin() + N);
      break;
    case Kind::Arith:
      for (std::int64_t k = 1; k <= N; ++k) out.push_back(a + b * k);
      break;
    case Kind::BoundedGap: {
      std::mt19937_64 rng(seed);
      std::int64_t cur = 0;
      for (std::int64_t k = 1; k <= N; ++k) {
        cur += 1 + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(gap));
        out.push_back(cur);
      }
      break;
    }
  }
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i] <= out[i - 1])
      throw invariant_error("sequence: generated terms are not increasing");
  return out;
}

std::int64_t SequenceSpec::gap_bound() const {
  switch (kind) {
    case Kind::Arith: return b;
    case Kind::BoundedGap: return gap;
    case Kind::Explicit: {
      std::int64_t g = values.empty() ? 0 : values.front();
      for (std::size_t i = 1; i < values.size(); ++i)
        g = std::max(g, values[i] - values[i - 1]);
      return g;
    }
  }
  return 0;
}

std::string SequenceSpec::describe() const {
  switch (kind) {
    case Kind::Explicit:
      return "explicit[" + std::to_string(values.size()) + "]";
    case Kind::Arith:
      return "n_k = " + std::to_string(a) + " + " + std::to_string(b) + " k";
    case Kind::BoundedGap:
      return "random gaps in [1," + std::to_string(gap) + "], seed " +
             std::to_string(seed);
  }
  return "";
}

namespace {

double sample_one(const SpectralMeasure& m, std::mt19937_64& rng);

double sample_cantor(std::mt19937_64& rng) {
  // x = n / 3^30 with random ternary digits in {0, 2}; n < 2^53, so
  // llround(x * 3^30) recovers every digit exactly
  std::int64_t n = 0;
  for (int i = 0; i < 30; ++i) {
    n *= 3;
    if (rng() & 1u) n += 2;
  }
  return static_cast<double>(n) / std::pow(3.0, 30);
}

double sample_riesz(const RieszSpec& spec, std::mt19937_64& rng) {
  // rejection against the truncated product density; cap the depth so the
  // omitted factors stay within ~1e-3 of the density in sup norm
  std::size_t K = spec.depth();
  if (!spec.finite) {
    double tail = 0.0;
    K = 0;
    for (std::size_t k = spec.depth(); k >= 1; --k) {
      tail += std::abs(spec.a(k));
      if (tail >= 1e-3) {
        K = k;
        break;
      }
    }
    if (K == 0) K = spec.depth();
    K = std::min<std::size_t>(std::max<std::size_t>(K, 1), 40);
  }
  double envelope = 1.0;
  for (std::size_t k = 1; k <= K; ++k) envelope *= 1.0 + std::abs(spec.a(k));
  for (int attempt = 0; attempt < 100000000; ++attempt) {
    double x = u01(rng);
    double p = 1.0;
    for (std::size_t k = 1; k <= K; ++k)
      p *= 1.0 + spec.a(k) *
                     std::cos(two_pi * static_cast<double>(spec.freqs[k - 1]) * x);
    if (u01(rng) * envelope <= p) return x;
  }
  throw invariant_error("riesz sampling: rejection loop did not terminate");
}

struct ConvexSampler {
  std::vector<double> cdf;  // at grid points x_i = i/M, size M+1
  std::int64_t M = 0;
};

ConvexSampler build_convex_sampler(const ConvexSeq& seq) {
  ConvexSampler s;
  auto build = build_nonneg_from_convex(seq, 4096, 1 << 15);
  const auto& samp = build.f.samples();
  s.M = build.f.grid_size();
  s.cdf.assign(static_cast<std::size_t>(s.M) + 1, 0.0);
  for (std::int64_t i = 0; i < s.M; ++i)
    s.cdf[static_cast<std::size_t>(i) + 1] =
        s.cdf[static_cast<std::size_t>(i)] +
        std::max(0.0, samp[static_cast<std::size_t>(i)].real());
  double total = s.cdf.back();
  if (total <= 0.0) throw invariant_error("convex sampling: empty density");
  for (auto& c : s.cdf) c /= total;
  return s;
}

double sample_convex(const ConvexSampler& s, std::mt19937_64& rng) {
  double u = u01(rng);
  auto it = std::upper_bound(s.cdf.begin(), s.cdf.end(), u);
  auto i = static_cast<std::int64_t>(it - s.cdf.begin()) - 1;
  i = std::clamp<std::int64_t>(i, 0, s.M - 1);
  double lo = s.cdf[static_cast<std::size_t>(i)];
  double hi = s.cdf[static_cast<std::size_t>(i) + 1];
  double frac = hi > lo ? (u - lo) / (hi - lo) : 0.5;
  return (static_cast<double>(i) + frac) / static_cast<double>(s.M);
}

double sample_one(const SpectralMeasure& m, std::mt19937_64& rng) {
  using K = SpectralMeasure::Kind;
  switch (m.kind()) {
    case K::Dirac: return m.dirac_x0();
    case K::Lebesgue: return u01(rng);
    case K::Cantor: return sample_cantor(rng);
    case K::Riesz: return sample_riesz(m.riesz_spec(), rng);
    case K::ConvexAC: {
      // rebuilt per call only in the mixture path; sample() caches below
      auto s = build_convex_sampler(m.convex_seq());
      return sample_convex(s, rng);
    }
    case K::Mixture: {
      double u = u01(rng), acc = 0.0;
      const auto& w = m.weights();
      const auto& parts = m.parts();
      for (std::size_t i = 0; i < w.size(); ++i) {
        acc += w[i];
        if (u <= acc || i + 1 == w.size()) return sample_one(*parts[i], rng);
      }
      return sample_one(*parts.back(), rng);
    }
    default:
      throw spec_error("sample: unsupported measure kind " + m.describe());
  }
}

}  // namespace

std::vector<double> sample(const SpectralMeasure& m, std::int64_t count,
                           std::uint64_t seed) {
  if (count < 1) throw spec_error("sample: count must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  if (m.kind() == SpectralMeasure::Kind::ConvexAC) {
    auto s = build_convex_sampler(m.convex_seq());
    for (std::int64_t i = 0; i < count; ++i)
      out.push_back(sample_convex(s, rng));
    return out;
  }
  for (std::int64_t i = 0; i < count; ++i) out.push_back(sample_one(m, rng));
  return out;
}

cplx weyl_sum(double x, std::int64_t m_freq, const SequenceSpec& seq,
              std::int64_t N) {
  if (m_freq == 0) throw spec_error("weyl_sum: m_freq must be nonzero");
  if (N < 1) throw spec_error("weyl_sum: N must be >= 1");
  auto terms = seq.prefix(N);
  cplx s = 0.0;
  for (auto nk : terms) {
    double phase = static_cast<double>(m_freq) * static_cast<double>(nk) * x;
    s += e(phase - std::floor(phase));
  }
  return s / static_cast<double>(N);
}

DelReport del_series(const SpectralMeasure& m, const SequenceSpec& seq,
                     std::int64_t m_freq, std::int64_t N_max) {
  if (N_max < 2) throw spec_error("del_series: N_max must be >= 2");
  if (m_freq == 0) throw spec_error("del_series: m_freq must be nonzero");
  DelReport rep;
  auto terms = seq.prefix(N_max);

  // W_N = sum_{k,j<=N} nuhat(m(n_k - n_j)), extended one index at a time
  double W = 0.0;
  double max_imag = 0.0;
  auto term_fn = [&](std::int64_t N) {
    cplx inc = 1.0;  // diagonal pair (N, N)
    auto nN = terms[static_cast<std::size_t>(N) - 1];
    for (std::int64_t j = 1; j < N; ++j) {
      auto t = m_freq * (nN - terms[static_cast<std::size_t>(j) - 1]);
      inc += m.coefficient(t) + m.coefficient(-t);
    }
    max_imag = std::max(max_imag, std::abs(inc.imag()));
    W += inc.real();
    if (W < -1e-9)
      throw invariant_error("del_series: negative paired partial sum");
    double dN = static_cast<double>(N);
    return W / (dN * dN * dN);
  };
  SeriesOptions opt;
  opt.n_max = N_max;
  rep.verdict = analyze_series(
      "sum_N N^-3 sum_{k,j<=N} nuhat(" + std::to_string(m_freq) +
          "(n_k - n_j)), " + seq.describe(),
      term_fn, opt);
  rep.final_sum = rep.verdict.final_sum();
  rep.max_imag = max_imag;

  // bound path via the difference-multiplicity bound V_N(t) <= N:
  // N^-2 sum_t V_N(t) |nuhat(m t)| <= N^-1 sum_{|t|<=n_N - n_1} |nuhat(m t)|
  std::int64_t g = seq.gap_bound();
  rep.bound_path_valid = g > 0;
  if (rep.bound_path_valid) {
    std::int64_t covered = 0;
    double csum = 1.0;  // t = 0
    for (const auto& [N, unused] : rep.verdict.checkpoints) {
      (void)unused;
      std::int64_t range = terms[static_cast<std::size_t>(N) - 1] - terms[0];
      for (std::int64_t t = covered + 1; t <= range; ++t)
        csum += std::abs(m.coefficient(m_freq * t)) +
                std::abs(m.coefficient(-m_freq * t));
      covered = std::max(covered, range);
      rep.bound_path.emplace_back(N, csum / static_cast<double>(N));
    }
  }
  return rep;
}

double discrepancy(std::vector<double> points) {
  if (points.empty()) throw spec_error("discrepancy: empty point list");
  std::sort(points.begin(), points.end());
  auto N = static_cast<double>(points.size());
  double d = 0.0;
  for (std::size_t k = 1; k <= points.size(); ++k) {
    double x = points[k - 1];
    d = std::max(d, static_cast<double>(k) / N - x);
    d = std::max(d, x - (static_cast<double>(k) - 1.0) / N);
  }
  return d;
}

std::int64_t max_difference_multiplicity(const SequenceSpec& seq,
                                         std::int64_t N) {
  auto terms = seq.prefix(N);
  std::unordered_map<std::int64_t, std::int64_t> count;
  for (std::int64_t k = 0; k < N; ++k)
    for (std::int64_t j = 0; j < N; ++j)
      if (j != k) ++count[terms[static_cast<std::size_t>(k)] -
                          terms[static_cast<std::size_t>(j)]];
  std::int64_t best = 0;
  for (const auto& [t, c] : count) best = std::max(best, c);
  return best;
}

UdReport ud_experiment(const SpectralMeasure& m, const SequenceSpec& seq,
                       std::int64_t samples, std::int64_t N,
                       std::vector<std::int64_t> m_freqs, std::uint64_t seed,
                       double weyl_threshold, double disc_threshold) {
  if (samples < 1) throw spec_error("ud_experiment: samples must be >= 1");
  if (m_freqs.empty()) throw spec_error("ud_experiment: no frequencies given");
  UdReport rep;
  rep.N = N;
  rep.m_freqs = m_freqs;
  rep.weyl_threshold = weyl_threshold;
  rep.disc_threshold = disc_threshold;

  auto xs = sample(m, samples, seed);
  auto terms = seq.prefix(N);
  std::int64_t passed = 0;
  for (double x : xs) {
    UdSampleStat st;
    st.x = x;
    std::vector<double> frac;
    frac.reserve(static_cast<std::size_t>(N));
    for (auto nk : terms) {
      double v = static_cast<double>(nk) * x;
      frac.push_back(v - std::floor(v));
    }
    for (auto mf : m_freqs) {
      cplx s = 0.0;
      for (double f : frac) s += e(static_cast<double>(mf) * f);
      st.max_weyl = std::max(st.max_weyl, std::abs(s) / static_cast<double>(N));
    }
    st.disc = discrepancy(frac);
    st.pass = st.max_weyl <= weyl_threshold && st.disc <= disc_threshold;
    if (st.pass) ++passed;
    rep.stats.push_back(st);
  }
  rep.pass_fraction =
      static_cast<double>(passed) / static_cast<double>(samples);

  auto quantiles = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::vector<double> q;
    for (double p : {0.0, 0.25, 0.5, 0.75, 0.95, 1.0}) {
      double idx = p * (static_cast<double>(v.size()) - 1.0);
      auto lo = static_cast<std::size_t>(idx);
      auto hi = std::min(lo + 1, v.size() - 1);
      q.push_back(v[lo] + (idx - static_cast<double>(lo)) * (v[hi] - v[lo]));
    }
    return q;
  };
  std::vector<double> ws, ds;
  for (const auto& st : rep.stats) {
    ws.push_back(st.max_weyl);
    ds.push_back(st.disc);
  }
  rep.weyl_quantiles = quantiles(ws);
  rep.disc_quantiles = quantiles(ds);
  return rep;
}

}  // namespace spectral

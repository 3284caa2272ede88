#pragma once

#include "spectral/measures.hpp"
#include "spectral/series.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace spectral {

// Strictly increasing distinct positive integers n_1 < n_2 < ...
struct SequenceSpec {
  enum class Kind { Explicit, Arith, BoundedGap };
  Kind kind = Kind::Arith;
  std::vector<std::int64_t> values;  // Explicit
  std::int64_t a = 0, b = 1;         // Arith: n_k = a + b k
  std::int64_t gap = 1;              // BoundedGap: gaps drawn from [1, gap]
  std::uint64_t seed = 0;

  static SequenceSpec arith(std::int64_t a, std::int64_t b);
  static SequenceSpec explicit_list(std::vector<std::int64_t> v);
  static SequenceSpec bounded_gap(std::int64_t d, std::uint64_t seed);

  // first N terms; validates the increasing/distinct invariant
  std::vector<std::int64_t> prefix(std::int64_t N) const;
  std::int64_t gap_bound() const;  // 0 when gaps are unbounded/unknown
  std::string describe() const;
};

// i.i.d. draws from the measure; deterministic for a fixed seed
std::vector<double> sample(const SpectralMeasure& m, std::int64_t count,
                           std::uint64_t seed);

// S_N(x, m) = (1/N) sum_{k<=N} e(m n_k x)
cplx weyl_sum(double x, std::int64_t m_freq, const SequenceSpec& seq,
              std::int64_t N);

struct DelReport {
  SeriesVerdict verdict;  // series of t_N = N^{-3} sum_{k,j<=N} nuhat(m(n_k-n_j))
  double final_sum = 0.0;
  double max_imag = 0.0;  // largest |Im| over the paired inner sums
  // multiplicity-bound path: N^{-2} * N * sum_{|t|<=range} |nuhat(m t)|
  std::vector<std::pair<std::int64_t, double>> bound_path;
  bool bound_path_valid = false;  // only for bounded-gap sequences
};
DelReport del_series(const SpectralMeasure& m, const SequenceSpec& seq,
                     std::int64_t m_freq, std::int64_t N_max);

// star discrepancy by the sorted-points formula
double discrepancy(std::vector<double> points);

// max_t #{(k,j) : k,j <= N, n_k - n_j = t != 0}
std::int64_t max_difference_multiplicity(const SequenceSpec& seq,
                                         std::int64_t N);

struct UdSampleStat {
  double x = 0.0;
  double max_weyl = 0.0;  // max over m_freqs of |S_N(x, m)|
  double disc = 0.0;      // star discrepancy of {n_k x}
  bool pass = false;
};
struct UdReport {
  std::vector<UdSampleStat> stats;  // in sample order
  double weyl_threshold = 0.0, disc_threshold = 0.0;
  std::int64_t N = 0;
  std::vector<std::int64_t> m_freqs;
  double pass_fraction = 0.0;
  // quantiles of max_weyl and disc at {0, .25, .5, .75, .95, 1}
  std::vector<double> weyl_quantiles, disc_quantiles;
};
UdReport ud_experiment(const SpectralMeasure& m, const SequenceSpec& seq,
                       std::int64_t samples, std::int64_t N,
                       std::vector<std::int64_t> m_freqs,
                       std::uint64_t seed = 7, double weyl_threshold = 0.05,
                       double disc_threshold = 0.02);

}  // namespace spectral

#pragma once

#include "spectral/measures.hpp"
#include "spectral/series.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace spectral {

// (1/(2N+1)) sum_{|n|<=N} |nuhat(n)|^2; estimates sum of squared atom masses
double wiener_average(const SpectralMeasure& m, std::int64_t N);

// sum_{n!=0} |nuhat(n)|^2 / |n|; Diverges certifies not hyperbounded
SeriesVerdict ht_series(const SpectralMeasure& m, std::int64_t N = 100000);

// sum_{n!=0} |nuhat(n)|^2 / (|n|^{2(p-1)/p} log^{1+eps}(1+|n|));
// Diverges certifies no L^p -> L^2 bound for this p in (1,2)
SeriesVerdict hr_series(const SpectralMeasure& m, double p, double eps,
                        std::int64_t N = 100000);

struct AlphaResult {
  double alpha = 0.0;
  double implied_p = 1.0;  // max{1, 2a/(a+2)}
  SeriesVerdict verdict;   // sum |nuhat(n)|^alpha
};
AlphaResult alpha_summability(const SpectralMeasure& m, double alpha,
                              std::int64_t N = 100000);

struct WindowCheck {
  std::int64_t N = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool violated = false;
};
struct WindowReport {
  double p = 0, q = 0, norm_cap = 1;
  std::int64_t a = 0, b = 1;
  double C_test = 0;  // Dirichlet test-function constant actually used
  std::vector<WindowCheck> sum_checks;     // window square sums vs bound
  bool any_violation = false;              // certifies no L^p->L^q with cap
  double r = 0;                            // q/(q-1)
  std::vector<std::pair<std::int64_t, double>> rpower_ratio;  // LHS_r/N^{(p-1)r/p}
  double K_observed = 0;
  bool rpower_growing = false;
  std::string note;
};
WindowReport window_bound_check(const SpectralMeasure& m, double p, double q,
                                double norm_cap, std::int64_t a, std::int64_t b,
                                std::int64_t N);

struct KornerResult {
  double C = 0.0;          // smallest constant over 1 <= n <= N (inf possible)
  bool finite = true;
  std::int64_t worst_n = 0;
  double decay_exponent = 0.0;  // fitted slope of log|nuhat(n)|^2 vs log n
  std::string note;
};
KornerResult korner_condition(const SpectralMeasure& m, std::int64_t N);

// smallest k <= k_max with sum_n |nuhat(n)|^{2k} summable
std::optional<int> harris_power_check(const SpectralMeasure& m, int k_max,
                                      std::int64_t N = 100000);

struct ClassifyOptions {
  std::int64_t N = 100000;
  std::vector<double> p_list = {1.2, 1.5, 1.9};
  double eps = 0.1;
  std::vector<double> alpha_list = {2.0, 3.0, 4.0};
  int harris_kmax = 4;
  double atom_threshold = 1e-3;
};

struct Classification {
  enum class Overall { NotHyperbounded, Hyperbounded, Inconclusive };

  bool has_atoms = false;
  double wiener_value = 0.0;       // at N
  double wiener_trend = 0.0;       // value(N) / value(N/64)
  bool rajchman = false;
  double max_tail_coeff = 0.0;     // max |nuhat| over the last decade
  SeriesVerdict ht;
  std::vector<AlphaResult> alpha;
  std::vector<std::pair<double, SeriesVerdict>> hr;  // per p
  KornerResult korner;
  bool korner_ok = false;
  std::optional<int> harris_power;
  Overall overall = Overall::Inconclusive;
  std::string witness;
  std::string note;
};

const char* to_string(Classification::Overall o);

Classification classify(const SpectralMeasure& m, ClassifyOptions opt = {});

}  // namespace spectral

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace spectral {

struct SeriesOptions {
  std::int64_t n_min = 1;
  std::int64_t n_max = 100000;
  double margin = 0.1;  // ceiling for the effective verdict margin
};

// Three-valued convergence diagnostic for a nonnegative series sum_n t(n).
// The tail model fitted over the last two decades is
//   log t(n) ~ c - beta*log n - gamma*log log n
// and the verdict compares (beta, gamma) against the 1/n boundary with an
// effective margin that tightens when the model fits the data well.
struct SeriesVerdict {
  enum class Verdict { Converges, Diverges, Inconclusive };

  std::string description;
  std::vector<std::pair<std::int64_t, double>> checkpoints;  // (N, partial sum)
  double tail_exponent = 0.0;  // fitted beta
  double log_exponent = 0.0;   // fitted gamma
  double fit_rmse = 0.0;
  double margin_used = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  std::string note;

  double final_sum() const {
    return checkpoints.empty() ? 0.0 : checkpoints.back().second;
  }
};

SeriesVerdict analyze_series(std::string description,
                             const std::function<double(std::int64_t)>& term,
                             SeriesOptions opt = {});

const char* to_string(SeriesVerdict::Verdict v);

}  // namespace spectral

#include "spectral/series.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace spectral {

const char* to_string(SeriesVerdict::Verdict v) {
  switch (v) {
    case SeriesVerdict::Verdict::Converges: return "Converges";
    case SeriesVerdict::Verdict::Diverges: return "Diverges";
    default: return "Inconclusive";
  }
}

namespace {

std::vector<std::int64_t> checkpoint_grid(std::int64_t n_max) {
  std::vector<std::int64_t> out;
  for (int k = 4;; ++k) {  // 100, 316, 1000, ...
    auto n = static_cast<std::int64_t>(std::llround(std::pow(10.0, k / 2.0)));
    if (n >= n_max) break;
    out.push_back(n);
  }
  out.push_back(n_max);
  return out;
}

}  // namespace

SeriesVerdict analyze_series(std::string description,
                             const std::function<double(std::int64_t)>& term,
                             SeriesOptions opt) {
  SeriesVerdict out;
  out.description = std::move(description);

  const std::int64_t n_max = std::max<std::int64_t>(opt.n_max, opt.n_min);
  const std::int64_t fit_from = std::max<std::int64_t>(opt.n_min, n_max / 100);
  auto cps = checkpoint_grid(n_max);
  std::size_t cp_idx = 0;

  double sum = 0.0;
  std::int64_t last_nonzero = 0;
  std::vector<std::pair<std::int64_t, double>> tail_terms;  // positive terms in fit window
  for (std::int64_t n = opt.n_min; n <= n_max; ++n) {
    double t = term(n);
    if (t > 0.0) {
      sum += t;
      last_nonzero = n;
      if (n >= fit_from) tail_terms.emplace_back(n, t);
    }
    while (cp_idx < cps.size() && n == cps[cp_idx]) {
      out.checkpoints.emplace_back(n, sum);
      ++cp_idx;
    }
  }

  if (last_nonzero < fit_from || tail_terms.size() < 8) {
    // nothing left in the tail window: finitely supported (or underflowed)
    out.verdict = SeriesVerdict::Verdict::Converges;
    out.note = "terms vanish in the tail window";
    return out;
  }

  // log-spaced subsample of at most ~240 positive tail terms
  std::vector<std::pair<std::int64_t, double>> pts;
  {
    const double lo = std::log(static_cast<double>(tail_terms.front().first));
    const double hi = std::log(static_cast<double>(tail_terms.back().first));
    std::size_t j = 0;
    for (int i = 0; i < 240; ++i) {
      double target = std::exp(lo + (hi - lo) * i / 239.0);
      while (j + 1 < tail_terms.size() &&
             static_cast<double>(tail_terms[j].first) < target)
        ++j;
      if (pts.empty() || pts.back().first != tail_terms[j].first)
        pts.push_back(tail_terms[j]);
    }
  }

  const auto m = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd X(m, 3);
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    double ln = std::log(static_cast<double>(pts[i].first));
    X(i, 0) = 1.0;
    X(i, 1) = -ln;
    X(i, 2) = -std::log(ln);
    y(i) = std::log(pts[i].second);
  }
  Eigen::Vector3d coef = X.colPivHouseholderQr().solve(y);
  double rmse = std::sqrt((X * coef - y).squaredNorm() / static_cast<double>(m));

  double beta = coef(1), gamma = coef(2);
  out.tail_exponent = beta;
  out.log_exponent = gamma;
  out.fit_rmse = rmse;
  double m_eff = std::max(0.01, std::min(opt.margin, 5.0 * rmse));
  out.margin_used = m_eff;

  using V = SeriesVerdict::Verdict;
  if (beta > 1.0 + m_eff) {
    out.verdict = V::Converges;
    out.note = "fitted power decay steeper than 1/n";
  } else if (beta < 1.0 - m_eff) {
    out.verdict = V::Diverges;
    out.note = "fitted power decay at most 1/n";
  } else if (gamma > 1.0 + m_eff) {
    out.verdict = V::Converges;
    out.note = "1/n power with summable log correction";
  } else if (gamma < 1.0 - m_eff) {
    out.verdict = V::Diverges;
    out.note = "1/n power with non-summable log correction";
  } else {
    out.verdict = V::Inconclusive;
    out.note = "fitted decay too close to the 1/n boundary";
  }
  return out;
}

}  // namespace spectral

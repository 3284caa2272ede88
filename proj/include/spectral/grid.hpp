#pragma once

#include "spectral/measures.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace spectral {

// Trigonometric polynomial of degree N held as coefficients on |n| <= N
// and/or samples on a uniform M-point grid (M a power of two, M >= 2N+1).
class GridFunction {
 public:
  GridFunction() = default;
  static GridFunction from_coeffs(std::vector<cplx> coeffs,  // size 2N+1
                                  std::int64_t M = 0);
  static GridFunction from_samples(std::vector<cplx> samples,
                                   std::int64_t degree);

  std::int64_t degree() const { return N_; }
  std::int64_t grid_size() const { return M_; }
  cplx coeff(std::int64_t n) const;  // 0 outside |n| <= N
  const std::vector<cplx>& coeffs() const { return coeffs_; }
  const std::vector<cplx>& samples() const { return samples_; }
  bool coeffs_authoritative() const { return coeffs_authoritative_; }

  // weighted by normalized Lebesgue measure; p = inf -> sup norm
  double norm(double p) const;
  cplx mean() const { return coeff(0); }

 private:
  void fill_samples();
  void fill_coeffs();

  std::int64_t N_ = 0;
  std::int64_t M_ = 0;
  bool coeffs_authoritative_ = true;
  std::vector<cplx> coeffs_;   // index n + N
  std::vector<cplx> samples_;  // x_i = i / M
};

// (P_nu f)^(n) = nuhat(n) fhat(n)
GridFunction apply_multiplier(const SpectralMeasure& m, const GridFunction& f);

// complex Dirichlet kernel D_N(x) = sum_{|k|<=N} e(kx)
GridFunction dirichlet(std::int64_t N);
// Fejer kernel K_N(x) = sum_{|k|<=N} (1-|k|/(N+1)) e(kx) >= 0
GridFunction fejer(std::int64_t N);
// ||D_N||_p by quadrature on a grid of >= 64 N points
double dirichlet_norm(std::int64_t N, double p);

struct ConvexBuild {
  GridFunction f;      // samples of C + sum_{n>=start} a_n cos(2 pi n x)
  double C = 0.0;      // additive constant from the backward linear extension
  double total_mass = 0.0;
  double grid_min = 0.0;
};
ConvexBuild build_nonneg_from_convex(const ConvexSeq& c, std::int64_t N_trunc,
                                     std::int64_t M = 0);

struct ProductPair {
  MeasurePtr nu1;  // odd-frequency part
  MeasurePtr nu2;  // even-frequency part
  double C1 = 0.0, C2 = 0.0;
  double min1 = 0.0, min2 = 0.0;  // grid minima of the shifted densities
  std::int64_t degree = 0;
};
ProductPair product_pair(std::int64_t degree);

struct ErgodicityCheck {
  double margin = 0.0;  // min_{0<|n|<=N} |nuhat(n) - 1|
  std::int64_t argmin = 0;
  std::int64_t N = 0;
  bool uniformly_ergodic = false;  // caveat: finite inspection only
};
ErgodicityCheck uniform_ergodicity_check(const SpectralMeasure& m,
                                         std::int64_t N);

struct NormLB {
  double value = 0.0;
  std::string witness;
  std::int64_t best_a = 0, best_b = 1, best_M = 0;
};
// max ||nu * f||_q / ||f||_p over Dirichlet test functions e(ax) D_M(bx)
// and random trigonometric polynomials; a certified lower bound
NormLB multiplier_norm_lower_bound(const SpectralMeasure& m, double p, double q,
                                   std::int64_t N, std::uint64_t seed = 1);

}  // namespace spectral

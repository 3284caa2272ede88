#pragma once

#include "spectral/common.hpp"
#include "spectral/series.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace spectral {

// Positive sequence given as a named rule or an explicit list with an
// optional tail rule.  Indexing is by the caller's natural index n >= 0.
struct SeqRule {
  enum class Kind { Explicit, InvLog, PowerLaw, Geometric };
  Kind kind = Kind::InvLog;
  std::vector<double> values;          // Explicit head
  std::shared_ptr<SeqRule> tail;       // Explicit tail rule (optional)
  double param = 0.0;                  // exponent s, or ratio r
  double shift = 1.0;                  // PowerLaw: (n + shift)^{-s}

  double operator()(std::int64_t n) const;
  std::string describe() const;

  static SeqRule inv_log();                         // 1/log(n+2)
  static SeqRule power_law(double s, double shift = 1.0);
  static SeqRule geometric(double r);               // r^n
  static SeqRule explicit_list(std::vector<double> v,
                               std::shared_ptr<SeqRule> tail = nullptr);
};

struct RieszSpec {
  std::vector<std::int64_t> freqs;  // n_1 < n_2 < ... (depth = freqs.size())
  SeqRule coeffs;                   // a_k, evaluated at k = 1, 2, ...
  bool finite = false;  // true: the measure IS the depth-K Riesz polynomial
  double min_ratio = 0.0;  // computed at validation

  std::size_t depth() const { return freqs.size(); }
  double a(std::size_t k) const { return coeffs(static_cast<std::int64_t>(k)); }
  std::int64_t representable_bound() const;  // sum of freqs
  void validate();  // lacunarity q > 3, a_k in [-1,1]\{0}

  static RieszSpec geometric_freqs(std::int64_t first, double ratio,
                                   std::size_t depth, SeqRule coeffs,
                                   bool finite = false);
  // extend a geometric spec until the decidable range covers [-range, range]
  static RieszSpec covering_range(std::int64_t first, double ratio,
                                  SeqRule coeffs, std::int64_t range,
                                  bool finite = false);
};

// unique signed decomposition m = sum_j eps_j n_j, eps in {-1,0,1}
std::optional<std::vector<int>> riesz_decompose(const RieszSpec& spec,
                                                std::int64_t m);

// partial sums of sum_j a_j^{2k}; Diverges <=> k-th convolution power singular
SeriesVerdict power_singularity_check(const RieszSpec& spec, int k,
                                      std::int64_t N);

struct ConvexSeq {
  std::int64_t start = 0;  // N
  SeqRule rule;            // a_n for n >= start, indexed by absolute n

  double a(std::int64_t n) const { return rule(n); }
  // positivity, decay, and second differences checked numerically
  void validate(std::int64_t check_up_to = 20000) const;
  // backward linear extension below `start`
  double extended(std::int64_t n) const;
};

class SpectralMeasure;
using MeasurePtr = std::shared_ptr<const SpectralMeasure>;

class SpectralMeasure {
 public:
  enum class Kind {
    Riesz,
    Cantor,
    ConvexAC,
    Dirac,
    Lebesgue,
    Convolution,
    Power,
    Mixture,
    Reflected,
    CosineAC,
  };

  static MeasurePtr riesz(RieszSpec spec);
  static MeasurePtr cantor();
  static MeasurePtr convex_ac(ConvexSeq seq);
  static MeasurePtr dirac(double x0);
  static MeasurePtr lebesgue();
  static MeasurePtr convolution(MeasurePtr left, MeasurePtr right);
  static MeasurePtr power(MeasurePtr base, int k);
  static MeasurePtr mixture(std::vector<double> weights,
                            std::vector<MeasurePtr> parts);
  static MeasurePtr reflected(MeasurePtr base);
  // absolutely continuous measure with real even coefficients:
  // coefficient(n) = half_coeff(|n|) for n != 0, 1 at n = 0
  static MeasurePtr cosine_ac(std::function<double(std::int64_t)> half_coeff,
                              std::string label);

  Kind kind() const { return kind_; }
  cplx coefficient(std::int64_t n) const;  // memoized
  std::string describe() const { return label_; }

  const RieszSpec& riesz_spec() const;
  const ConvexSeq& convex_seq() const;
  double convex_total_mass() const;  // ConvexAC: integral of the density
  double convex_shift() const;       // ConvexAC: the constant C
  double dirac_x0() const;
  int power_k() const;
  const std::vector<double>& weights() const;
  const std::vector<MeasurePtr>& parts() const;

  // largest |n| with a defined coefficient (riesz truncation); 0 = unlimited
  std::int64_t evaluation_bound() const;

 private:
  SpectralMeasure() = default;
  cplx eval(std::int64_t n) const;

  Kind kind_ = Kind::Lebesgue;
  std::string label_;
  RieszSpec riesz_;
  ConvexSeq convex_;
  double convex_mass_ = 1.0;
  double convex_shift_ = 0.0;
  double x0_ = 0.0;
  int k_ = 1;
  std::vector<double> weights_;
  std::vector<MeasurePtr> parts_;
  std::function<double(std::int64_t)> half_coeff_;

  mutable std::mutex cache_mu_;
  mutable std::unordered_map<std::int64_t, cplx> cache_;
};

}  // namespace spectral

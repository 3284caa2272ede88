#include "spectral/measures.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace spectral {

// ---------------------------------------------------------------- SeqRule

double SeqRule::operator()(std::int64_t n) const {
  switch (kind) {
    case Kind::Explicit:
      if (n >= 0 && static_cast<std::size_t>(n) < values.size())
        return values[static_cast<std::size_t>(n)];
      if (tail) return (*tail)(n);
      throw spec_error("explicit sequence has no value at index " +
                       std::to_string(n));
    case Kind::InvLog:
      return 1.0 / std::log(static_cast<double>(n) + 2.0);
    case Kind::PowerLaw:
      return std::pow(static_cast<double>(n) + shift, -param);
    case Kind::Geometric:
      return std::pow(param, static_cast<double>(n));
  }
  throw spec_error("bad sequence rule");
}

std::string SeqRule::describe() const {
  switch (kind) {
    case Kind::Explicit: return "explicit";
    case Kind::InvLog: return "1/log(n+2)";
    case Kind::PowerLaw:
      return "(n+" + std::to_string(shift) + ")^-" + std::to_string(param);
    case Kind::Geometric: return std::to_string(param) + "^n";
  }
  return "?";
}

SeqRule SeqRule::inv_log() { return SeqRule{}; }

SeqRule SeqRule::power_law(double s, double shift) {
  SeqRule r;
  r.kind = Kind::PowerLaw;
  r.param = s;
  r.shift = shift;
  return r;
}

SeqRule SeqRule::geometric(double ratio) {
  SeqRule r;
  r.kind = Kind::Geometric;
  r.param = ratio;
  return r;
}

SeqRule SeqRule::explicit_list(std::vector<double> v,
                               std::shared_ptr<SeqRule> tail) {
  SeqRule r;
  r.kind = Kind::Explicit;
  r.values = std::move(v);
  r.tail = std::move(tail);
  return r;
}

// --------------------------------------------------------------- RieszSpec

std::int64_t RieszSpec::representable_bound() const {
  std::int64_t s = 0;
  for (auto f : freqs) s += f;
  return s;
}

void RieszSpec::validate() {
  if (freqs.empty()) throw spec_error("riesz: empty frequency list");
  if (freqs.front() < 1) throw spec_error("riesz: frequencies must be >= 1");
  min_ratio = freqs.size() > 1 ? 1e300 : 4.0;
  for (std::size_t k = 1; k < freqs.size(); ++k) {
    if (freqs[k] <= freqs[k - 1])
      throw spec_error("riesz: frequencies must increase");
    min_ratio = std::min(min_ratio, static_cast<double>(freqs[k]) /
                                        static_cast<double>(freqs[k - 1]));
  }
  if (min_ratio <= 3.0)
    throw spec_error("riesz: lacunarity ratio must exceed 3, got " +
                     std::to_string(min_ratio));
  for (std::size_t k = 1; k <= freqs.size(); ++k) {
    double ak = a(k);
    if (!(std::abs(ak) <= 1.0) || ak == 0.0)
      throw spec_error("riesz: coefficients must lie in [-1,1] \\ {0}");
  }
}

RieszSpec RieszSpec::geometric_freqs(std::int64_t first, double ratio,
                                     std::size_t depth, SeqRule coeffs,
                                     bool finite) {
  RieszSpec s;
  double f = static_cast<double>(first);
  for (std::size_t k = 0; k < depth; ++k) {
    s.freqs.push_back(static_cast<std::int64_t>(std::llround(f)));
    f *= ratio;
  }
  s.coeffs = std::move(coeffs);
  s.finite = finite;
  s.validate();
  return s;
}

RieszSpec RieszSpec::covering_range(std::int64_t first, double ratio,
                                    SeqRule coeffs, std::int64_t range,
                                    bool finite) {
  std::size_t depth = 1;
  RieszSpec s = geometric_freqs(first, ratio, depth, coeffs, finite);
  while (s.representable_bound() < range && depth < 64)
    s = geometric_freqs(first, ratio, ++depth, coeffs, finite);
  return s;
}

std::optional<std::vector<int>> riesz_decompose(const RieszSpec& spec,
                                                std::int64_t m) {
  // The forced-choice descent: with ratio q > 3 the lower frequencies sum to
  // less than n_j/2, so eps_j = sign(m) iff |m| > n_j/2.
  std::vector<int> eps(spec.depth(), 0);
  std::int64_t r = m;
  for (std::size_t j = spec.depth(); j-- > 0;) {
    if (2 * std::llabs(r) > spec.freqs[j]) {
      int s = r > 0 ? 1 : -1;
      eps[j] = s;
      r -= s * spec.freqs[j];
    }
  }
  if (r != 0) return std::nullopt;
  return eps;
}

SeriesVerdict power_singularity_check(const RieszSpec& spec, int k,
                                      std::int64_t N) {
  if (k < 1) throw spec_error("power_singularity_check: k must be >= 1");
  SeriesOptions opt;
  opt.n_max = N;
  auto coeffs = spec.coeffs;
  return analyze_series(
      "sum_j a_j^(2k), k=" + std::to_string(k),
      [coeffs, k](std::int64_t j) {
        return std::pow(std::abs(coeffs(j)), 2.0 * k);
      },
      opt);
}

// --------------------------------------------------------------- ConvexSeq

void ConvexSeq::validate(std::int64_t check_up_to) const {
  if (start < 0) throw spec_error("convex sequence: start must be >= 0");
  double prev = 0.0;
  for (std::int64_t n = start; n < start + check_up_to; ++n) {
    double an = a(n);
    if (!(an > 0.0))
      throw spec_error("convex sequence: values must be positive");
    double d2 = an + a(n + 2) - 2.0 * a(n + 1);
    if (d2 < -1e-12 * std::max(1.0, an))
      throw spec_error("convex sequence: second difference negative at n=" +
                       std::to_string(n));
    if (n > start && an > prev + 1e-12)
      throw spec_error("convex sequence: values must be non-increasing");
    prev = an;
  }
}

double ConvexSeq::extended(std::int64_t n) const {
  if (n >= start) return a(n);
  double slope = a(start) - a(start + 1);
  return a(start) + static_cast<double>(start - n) * slope;
}

// ---------------------------------------------------------- SpectralMeasure

namespace {

// C for the convex construction: sup over a fine grid of
// |sum_{n < start} ext_a(n) cos(2 pi n x)| (0 when start == 0).
double convex_head_sup(const ConvexSeq& c) {
  if (c.start == 0) return 0.0;
  std::int64_t M = std::max<std::int64_t>(1024, 8 * c.start);
  double best = 0.0;
  for (std::int64_t i = 0; i < M; ++i) {
    double x = static_cast<double>(i) / static_cast<double>(M);
    double s = 0.0;
    for (std::int64_t n = 0; n < c.start; ++n)
      s += c.extended(n) * std::cos(two_pi * n * x);
    best = std::max(best, std::abs(s));
  }
  return best;
}

double cantor_product(std::int64_t n) {
  // prod_{k>=1} cos(2 pi n / 3^k), truncated once the certified tail
  // perturbation (sum of |1-cos| bounds, geometric with ratio 1/9) is < 1e-14
  double prod = 1.0;
  double t = two_pi * static_cast<double>(n);
  for (;;) {
    t /= 3.0;
    if (t * t * (9.0 / 16.0) < 1e-14) break;
    prod *= std::cos(t);
    if (prod == 0.0) break;
  }
  return prod;
}

}  // namespace

MeasurePtr SpectralMeasure::riesz(RieszSpec spec) {
  spec.validate();
  auto m = std::shared_ptr<SpectralMeasure>(new SpectralMeasure());
  m->kind_ = Kind::Riesz;
  m->riesz_ = std::move(spec);
  m->label_ = "riesz(K=" + std::to_string(m->riesz_.depth()) +
              (m->riesz_.finite ? ",finite" : "") + ")";
  return m;
}

MeasurePtr SpectralMeasure::cantor() {
  auto m = std::shared_ptr<SpectralMeasure>(new SpectralMeasure());
  m->kind_ = Kind::Cantor;
  m->label_ = "cantor";
  return m;
}

MeasurePtr SpectralMeasure::convex_ac(ConvexSeq seq) {
  seq.validate();
  auto m = std::shared_ptr<SpectralMeasure>(new SpectralMeasure());
  m->kind_ = Kind::ConvexAC;
  m->convex_ = std::move(seq);
  m->convex_shift_ = convex_head_sup(m->convex_);
  m->convex_mass_ =
      m->convex_shift_ + (m->convex_.start == 0 ? m->convex_.a(0) : 0.0);
  if (!(m->convex_mass_ > 0.0))
    throw spec_error("convex_ac: zero total mass");
  m->label_ = "convex_ac(" + m->convex_.rule.describe() + ")";
  return m;
}

MeasurePtr SpectralMeasure::dirac(double x0) {
  if (!(x0 >= 0.0 && x0 < 1.0))
    throw spec_error("dirac: x0 must lie in [0,1)");
  auto m = std::shared_ptr<SpectralMeasure>(new SpectralMeasure());
  m->kind_ = Kind::Dirac;
  m->x0_ = x0;
  m->label_ = "dirac(" + std::to_string(x0) + ")";
  return m;
}

MeasurePtr SpectralMeasure::lebesgue() {
  auto m = std::shared_ptr<SpectralMeasure>(new SpectralMeasure());
  m->kind_ = Kind::Lebesgue;
  m->label_ = "lebesgue";
  return m;
}

MeasurePtr SpectralMeasure::convolution(MeasurePtr left, MeasurePtr right) {
  if (!left || !right) throw spec_error("convolution: missing child");
  auto m = std::shared_ptr<SpectralMeasure>(new SpectralMeasure());
  m->kind_ = Kind::Convolution;
  m->parts_ = {std::move(left), std::move(right)};
  m->label_ =
      "conv(" + m->parts_[0]->describe() + "," + m->parts_[1]->describe() + ")";
  return m;
}

MeasurePtr SpectralMeasure::power(MeasurePtr base, int k) {
  if (!base) throw spec_error("power: missing base");
  if (k < 1) throw spec_error("power: k must be >= 1");
  auto m = std::shared_ptr<SpectralMeasure>(new SpectralMeasure());
  m->kind_ = Kind::Power;
  m->k_ = k;
  m->parts_ = {std::move(base)};
  m->label_ = "power(" + m->parts_[0]->describe() + "," + std::to_string(k) + ")";
  return m;
}

MeasurePtr SpectralMeasure::mixture(std::vector<double> weights,
                                    std::vector<MeasurePtr> parts) {
  if (weights.size() != parts.size() || parts.empty())
    throw spec_error("mixture: weights and parts must match and be nonempty");
  double s = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw spec_error("mixture: negative weight");
    s += w;
  }
  if (std::abs(s - 1.0) > 1e-9)
    throw spec_error("mixture: weights must sum to 1");
  auto m = std::shared_ptr<SpectralMeasure>(new SpectralMeasure());
  m->kind_ = Kind::Mixture;
  m->weights_ = std::move(weights);
  m->parts_ = std::move(parts);
  m->label_ = "mixture(" + std::to_string(m->parts_.size()) + ")";
  return m;
}

MeasurePtr SpectralMeasure::reflected(MeasurePtr base) {
  if (!base) throw spec_error("reflected: missing base");
  auto m = std::shared_ptr<SpectralMeasure>(new SpectralMeasure());
  m->kind_ = Kind::Reflected;
  m->parts_ = {std::move(base)};
  m->label_ = "reflected(" + m->parts_[0]->describe() + ")";
  return m;
}

MeasurePtr SpectralMeasure::cosine_ac(
    std::function<double(std::int64_t)> half_coeff, std::string label) {
  auto m = std::shared_ptr<SpectralMeasure>(new SpectralMeasure());
  m->kind_ = Kind::CosineAC;
  m->half_coeff_ = std::move(half_coeff);
  m->label_ = std::move(label);
  return m;
}

const RieszSpec& SpectralMeasure::riesz_spec() const {
  if (kind_ != Kind::Riesz) throw spec_error("not a riesz measure");
  return riesz_;
}

const ConvexSeq& SpectralMeasure::convex_seq() const {
  if (kind_ != Kind::ConvexAC) throw spec_error("not a convex_ac measure");
  return convex_;
}

double SpectralMeasure::convex_total_mass() const {
  if (kind_ != Kind::ConvexAC) throw spec_error("not a convex_ac measure");
  return convex_mass_;
}

double SpectralMeasure::convex_shift() const {
  if (kind_ != Kind::ConvexAC) throw spec_error("not a convex_ac measure");
  return convex_shift_;
}

double SpectralMeasure::dirac_x0() const {
  if (kind_ != Kind::Dirac) throw spec_error("not a dirac measure");
  return x0_;
}

int SpectralMeasure::power_k() const {
  if (kind_ != Kind::Power) throw spec_error("not a power measure");
  return k_;
}

const std::vector<double>& SpectralMeasure::weights() const {
  if (kind_ != Kind::Mixture) throw spec_error("not a mixture");
  return weights_;
}

const std::vector<MeasurePtr>& SpectralMeasure::parts() const {
  return parts_;
}

std::int64_t SpectralMeasure::evaluation_bound() const {
  switch (kind_) {
    case Kind::Riesz:
      return riesz_.finite ? 0 : riesz_.representable_bound();
    case Kind::Convolution: {
      auto l = parts_[0]->evaluation_bound(), r = parts_[1]->evaluation_bound();
      if (l == 0) return r;
      if (r == 0) return l;
      return std::min(l, r);
    }
    case Kind::Power:
    case Kind::Reflected:
      return parts_[0]->evaluation_bound();
    case Kind::Mixture: {
      std::int64_t b = 0;
      for (const auto& p : parts_) {
        auto pb = p->evaluation_bound();
        if (pb != 0) b = b == 0 ? pb : std::min(b, pb);
      }
      return b;
    }
    default:
      return 0;
  }
}

cplx SpectralMeasure::coefficient(std::int64_t n) const {
  {
    std::lock_guard<std::mutex> lk(cache_mu_);
    auto it = cache_.find(n);
    if (it != cache_.end()) return it->second;
  }
  cplx v = eval(n);
  {
    std::lock_guard<std::mutex> lk(cache_mu_);
    if (cache_.size() < (1u << 22)) cache_.emplace(n, v);
  }
  return v;
}

cplx SpectralMeasure::eval(std::int64_t n) const {
  switch (kind_) {
    case Kind::Lebesgue:
      return n == 0 ? 1.0 : 0.0;
    case Kind::Dirac:
      return e(-static_cast<double>(n) * x0_);
    case Kind::Cantor: {
      // nuhat(n) = e(-n/2) * prod_{k>=1} cos(2 pi n / 3^k)
      double sign = (n % 2 == 0) ? 1.0 : -1.0;
      return sign * cantor_product(n);
    }
    case Kind::Riesz: {
      if (!riesz_.finite && std::llabs(n) > riesz_.representable_bound())
        throw std::out_of_range(
            "riesz coefficient outside the representable bound of depth " +
            std::to_string(riesz_.depth()));
      auto eps = riesz_decompose(riesz_, n);
      if (!eps) return 0.0;
      double prod = 1.0;
      for (std::size_t j = 0; j < eps->size(); ++j)
        if ((*eps)[j] != 0) prod *= riesz_.a(j + 1) / 2.0;
      return prod;
    }
    case Kind::ConvexAC: {
      if (n == 0) return 1.0;
      std::int64_t an = std::llabs(n);
      if (an < std::max<std::int64_t>(convex_.start, 1)) return 0.0;
      return convex_.a(an) / (2.0 * convex_mass_);
    }
    case Kind::CosineAC:
      return n == 0 ? 1.0 : half_coeff_(std::llabs(n));
    case Kind::Convolution:
      return parts_[0]->coefficient(n) * parts_[1]->coefficient(n);
    case Kind::Power: {
      cplx c = parts_[0]->coefficient(n);
      cplx out = 1.0;
      for (int i = 0; i < k_; ++i) out *= c;
      return out;
    }
    case Kind::Mixture: {
      cplx s = 0.0;
      for (std::size_t i = 0; i < parts_.size(); ++i)
        s += weights_[i] * parts_[i]->coefficient(n);
      return s;
    }
    case Kind::Reflected:
      // x -> -x sends e(-nx) to e(nx), so the coefficient is the base's
      // value at -n (equivalently its conjugate, the measure being positive)
      return parts_[0]->coefficient(-n);
  }
  throw spec_error("bad measure kind");
}

}  // namespace spectral

#include "spectral/finite.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <numeric>
#include <optional>
#include <unordered_map>

#include <Eigen/Eigenvalues>

namespace spectral {

namespace {

std::vector<std::vector<int>> support_adj(const FiniteOp& op) {
  int n = op.n();
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (op.S(i, j) > op.tol) adj[static_cast<std::size_t>(i)].push_back(j);
  return adj;
}

std::vector<char> reachable(const std::vector<std::vector<int>>& adj,
                            int from) {
  std::vector<char> seen(adj.size(), 0);
  std::deque<int> q{from};
  seen[static_cast<std::size_t>(from)] = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    for (int v : adj[static_cast<std::size_t>(u)])
      if (!seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = 1;
        q.push_back(v);
      }
  }
  return seen;
}

Eigen::VectorXd project_mean_zero(const FiniteOp& op, Eigen::VectorXd f) {
  double mean = op.mu.dot(f);
  f.array() -= mean;
  return f;
}

Eigen::VectorXd normalize_p(const FiniteOp& op, Eigen::VectorXd f, double p) {
  double nrm = op.fnorm(f, p);
  if (nrm <= 0.0) return f;
  return f / nrm;
}

// weighted L2 operator norm of a matrix acting on functions, by power
// iteration on the symmetrized operator
double weighted_l2_norm(const FiniteOp& op, const Eigen::MatrixXd& M,
                        int max_iter = 20000, double tol = 1e-14) {
  int n = op.n();
  Eigen::VectorXd w = op.mu.array().sqrt();
  Eigen::MatrixXd A = w.asDiagonal() * M * w.cwiseInverse().asDiagonal();
  Eigen::MatrixXd AtA = A.transpose() * A;
  std::mt19937_64 rng(7);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = 2.0 * u01(rng) - 1.0;
  v.normalize();
  double lam = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd nv = AtA * v;
    double nn = nv.norm();
    if (nn <= 1e-280) return 0.0;
    nv /= nn;
    double nl = nv.dot(AtA * nv);
    if (std::abs(nl - lam) < tol * std::max(1.0, nl) && it > 8) {
      lam = nl;
      break;
    }
    lam = nl;
    v = nv;
  }
  return std::sqrt(std::max(0.0, lam));
}

}  // namespace

FiniteOp FiniteOp::dual() const {
  FiniteOp d;
  d.mu = mu;
  d.tol = tol;
  d.S = mu.cwiseInverse().asDiagonal() * S.transpose() * mu.asDiagonal();
  return d;
}

double FiniteOp::fnorm(const Eigen::VectorXd& f, double p) const {
  if (std::isinf(p)) return f.cwiseAbs().maxCoeff();
  double s = 0.0;
  for (int i = 0; i < n(); ++i) s += mu(i) * std::pow(std::abs(f(i)), p);
  return std::pow(s, 1.0 / p);
}

double FiniteOp::fnorm(const Eigen::VectorXcd& f, double p) const {
  if (std::isinf(p)) return f.cwiseAbs().maxCoeff();
  double s = 0.0;
  for (int i = 0; i < n(); ++i) s += mu(i) * std::pow(std::abs(f(i)), p);
  return std::pow(s, 1.0 / p);
}

ValidationReport validate(const FiniteOp& op) {
  ValidationReport rep;
  int n = op.n();
  if (n == 0 || op.S.rows() != n || op.S.cols() != n) {
    rep.violations.push_back("shape mismatch between mu and S");
    return rep;
  }
  double musum = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!(op.mu(i) > 0.0))
      rep.violations.push_back("mu[" + std::to_string(i) + "] <= 0");
    musum += op.mu(i);
  }
  if (std::abs(musum - 1.0) > 1e-9)
    rep.violations.push_back("mu does not sum to 1");
  for (int i = 0; i < n; ++i) {
    double rs = 0.0;
    for (int j = 0; j < n; ++j) {
      if (op.S(i, j) < -op.tol)
        rep.violations.push_back("S[" + std::to_string(i) + "][" +
                                 std::to_string(j) + "] negative");
      rs += op.S(i, j);
    }
    if (std::abs(rs - 1.0) > 10 * op.tol)
      rep.violations.push_back("row " + std::to_string(i) +
                               " sum != 1 (got " + std::to_string(rs) + ")");
  }
  Eigen::VectorXd muS = op.S.transpose() * op.mu;
  for (int j = 0; j < n; ++j)
    if (std::abs(muS(j) - op.mu(j)) > 10 * op.tol) {
      rep.violations.push_back("mu S != mu at column " + std::to_string(j));
      break;
    }
  rep.ok = rep.violations.empty();
  if (!rep.ok) return rep;

  auto adj = support_adj(op);
  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  int nc = 0;
  for (int i = 0; i < n; ++i) {
    if (comp[static_cast<std::size_t>(i)] >= 0) continue;
    auto fwd = reachable(adj, i);
    std::vector<std::vector<int>> radj(static_cast<std::size_t>(n));
    for (int u = 0; u < n; ++u)
      for (int v : adj[static_cast<std::size_t>(u)])
        radj[static_cast<std::size_t>(v)].push_back(u);
    auto bwd = reachable(radj, i);
    std::vector<int> members;
    for (int j = 0; j < n; ++j)
      if (fwd[static_cast<std::size_t>(j)] && bwd[static_cast<std::size_t>(j)])
        members.push_back(j);
    for (int j : members) comp[static_cast<std::size_t>(j)] = nc;
    rep.components.push_back(members);
    ++nc;
  }
  rep.ergodic = nc == 1;
  return rep;
}

FiniteOp restrict_to(const FiniteOp& op, const std::vector<int>& states) {
  FiniteOp r;
  auto m = static_cast<int>(states.size());
  r.mu.resize(m);
  r.S.resize(m, m);
  double mass = 0.0;
  for (int i = 0; i < m; ++i) mass += op.mu(states[static_cast<std::size_t>(i)]);
  for (int i = 0; i < m; ++i) {
    r.mu(i) = op.mu(states[static_cast<std::size_t>(i)]) / mass;
    for (int j = 0; j < m; ++j)
      r.S(i, j) = op.S(states[static_cast<std::size_t>(i)],
                       states[static_cast<std::size_t>(j)]);
  }
  r.tol = op.tol;
  return r;
}

int graph_period(const FiniteOp& op) {
  auto adj = support_adj(op);
  int n = op.n();
  std::vector<std::int64_t> lvl(static_cast<std::size_t>(n), -1);
  std::deque<int> q{0};
  lvl[0] = 0;
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    for (int v : adj[static_cast<std::size_t>(u)])
      if (lvl[static_cast<std::size_t>(v)] < 0) {
        lvl[static_cast<std::size_t>(v)] = lvl[static_cast<std::size_t>(u)] + 1;
        q.push_back(v);
      }
  }
  std::int64_t g = 0;
  for (int u = 0; u < n; ++u)
    for (int v : adj[static_cast<std::size_t>(u)])
      g = std::gcd(g, std::llabs(lvl[static_cast<std::size_t>(u)] + 1 -
                                 lvl[static_cast<std::size_t>(v)]));
  return g == 0 ? 1 : static_cast<int>(g);
}

CyclicDecomposition period_and_classes(const FiniteOp& op) {
  auto rep = validate(op);
  if (!rep.ok) throw spec_error("period_and_classes: invalid operator");
  if (!rep.ergodic)
    throw spec_error(
        "period_and_classes: operator is not ergodic; analyze its "
        "communicating classes separately");
  CyclicDecomposition dec;
  dec.d = graph_period(op);
  int n = op.n();
  auto adj = support_adj(op);
  std::vector<std::int64_t> lvl(static_cast<std::size_t>(n), -1);
  std::deque<int> q{0};
  lvl[0] = 0;
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    for (int v : adj[static_cast<std::size_t>(u)])
      if (lvl[static_cast<std::size_t>(v)] < 0) {
        lvl[static_cast<std::size_t>(v)] = lvl[static_cast<std::size_t>(u)] + 1;
        q.push_back(v);
      }
  }
  // orientation such that P 1_{A_j} = 1_{A_{j+1}}; A_0 contains state 0
  dec.cls.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    dec.cls[static_cast<std::size_t>(i)] = static_cast<int>(
        ((-lvl[static_cast<std::size_t>(i)]) % dec.d + dec.d) % dec.d);
  for (int u = 0; u < n; ++u)
    for (int v : adj[static_cast<std::size_t>(u)])
      if (dec.cls[static_cast<std::size_t>(v)] !=
          (dec.cls[static_cast<std::size_t>(u)] + dec.d - 1) % dec.d)
        throw invariant_error(
            "period_and_classes: support edge violates the cyclic structure");
  dec.class_mass.assign(static_cast<std::size_t>(dec.d), 0.0);
  for (int i = 0; i < n; ++i)
    dec.class_mass[static_cast<std::size_t>(
        dec.cls[static_cast<std::size_t>(i)])] += op.mu(i);
  for (double cm : dec.class_mass)
    if (std::abs(cm - 1.0 / dec.d) > 1e-9)
      throw invariant_error("period_and_classes: class mass differs from 1/d");
  dec.Ed = projection_Ed(op, dec);
  return dec;
}

Eigen::MatrixXd projection_Ed(const FiniteOp& op,
                              const CyclicDecomposition& dec) {
  int n = op.n();
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (dec.cls[static_cast<std::size_t>(i)] ==
          dec.cls[static_cast<std::size_t>(j)])
        E(i, j) = op.mu(j) /
                  dec.class_mass[static_cast<std::size_t>(
                      dec.cls[static_cast<std::size_t>(i)])];
  return E;
}

namespace {

double objective(const FiniteOp& op, const Eigen::VectorXd& f, double q) {
  return op.fnorm(op.apply(f), q);
}

Eigen::VectorXd objective_grad(const FiniteOp& op, const Eigen::VectorXd& f,
                               double q) {
  Eigen::VectorXd g = op.apply(f);
  int n = op.n();
  if (std::isinf(q)) {
    int best = 0;
    g.cwiseAbs().maxCoeff(&best);
    double s = g(best) >= 0 ? 1.0 : -1.0;
    return s * op.S.row(best).transpose();
  }
  double nrm = op.fnorm(g, q);
  if (nrm <= 0.0) return Eigen::VectorXd::Zero(n);
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) {
    double a = std::max(std::abs(g(i)), 1e-30);
    w(i) = op.mu(i) * std::pow(a, q - 1.0) * (g(i) >= 0 ? 1.0 : -1.0);
  }
  return op.S.transpose() * w / std::pow(nrm, q - 1.0);
}

// single gradient-ascent run on the weighted p-sphere
std::pair<double, Eigen::VectorXd> ascend(const FiniteOp& op,
                                          Eigen::VectorXd f, double p, double q,
                                          bool mean_zero,
                                          const OpnormOptions& opt) {
  if (mean_zero) f = project_mean_zero(op, f);
  if (op.fnorm(f, p) <= 1e-14) return {0.0, f};
  f = normalize_p(op, f, p);
  double val = objective(op, f, q);
  double eta = 0.25;
  int stall = 0;
  for (int it = 0; it < opt.max_iter && stall < 6 && eta > 1e-16; ++it) {
    Eigen::VectorXd g = objective_grad(op, f, q);
    bool improved = false;
    for (int bt = 0; bt < 30; ++bt) {
      Eigen::VectorXd cand = f + eta * g;
      if (mean_zero) cand = project_mean_zero(op, cand);
      if (op.fnorm(cand, p) <= 1e-14) break;
      cand = normalize_p(op, cand, p);
      double cv = objective(op, cand, q);
      if (cv > val) {
        if (cv < val + opt.tol * std::max(1.0, val)) ++stall;
        else stall = 0;
        f = cand;
        val = cv;
        eta *= 1.5;
        improved = true;
        break;
      }
      eta *= 0.5;
    }
    if (!improved) ++stall;
  }
  return {val, f};
}

}  // namespace

NormEstimate opnorm(const FiniteOp& op, double p, double q, bool mean_zero,
                    OpnormOptions opt) {
  if (!(p >= 1.0) || !(q >= 1.0)) throw spec_error("opnorm: p,q must be >= 1");
  int n = op.n();
  NormEstimate out;

  if (p == 2.0 && q == 2.0) {
    // power iteration on the adjoint-composed operator
    Eigen::VectorXd w = op.mu.array().sqrt();
    Eigen::MatrixXd A =
        w.asDiagonal() * op.S * w.cwiseInverse().asDiagonal();
    Eigen::VectorXd wn = w.normalized();
    auto proj = [&](Eigen::VectorXd v) {
      if (mean_zero) v -= wn * wn.dot(v);
      return v;
    };
    Eigen::MatrixXd AtA = A.transpose() * A;
    std::mt19937_64 rng(opt.seed);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = 2.0 * u01(rng) - 1.0;
    v = proj(v);
    if (v.norm() <= 1e-14) v = proj(Eigen::VectorXd::Unit(n, 0));
    v.normalize();
    double lam = 0.0;
    int it = 0;
    for (; it < 500000; ++it) {
      Eigen::VectorXd nv = proj(AtA * proj(v));
      double nn = nv.norm();
      if (nn <= 1e-280) {
        lam = 0.0;
        break;
      }
      nv /= nn;
      double nl = nv.dot(proj(AtA * proj(nv)));
      bool done = std::abs(nl - lam) < 1e-14 * std::max(1.0, nl) && it > 16;
      lam = nl;
      v = nv;
      if (done) break;
    }
    out.value = std::sqrt(std::max(0.0, lam));
    out.witness = w.cwiseInverse().asDiagonal() * v;
    out.method = "power_iteration";
    out.iterations = it;
    return out;
  }

  if (std::isinf(q) && !mean_zero) {
    // exact via the dual-row formulation
    double best = 0.0;
    int best_row = 0;
    for (int i = 0; i < n; ++i) {
      double v;
      if (p == 1.0) {
        v = 0.0;
        for (int j = 0; j < n; ++j) v = std::max(v, op.S(i, j) / op.mu(j));
      } else if (std::isinf(p)) {
        v = op.S.row(i).cwiseAbs().sum();
      } else {
        double pp = p / (p - 1.0);
        v = 0.0;
        for (int j = 0; j < n; ++j)
          v += op.mu(j) * std::pow(op.S(i, j) / op.mu(j), pp);
        v = std::pow(v, 1.0 / pp);
      }
      if (v > best) {
        best = v;
        best_row = i;
      }
    }
    Eigen::VectorXd f(n);
    if (p == 1.0) {
      int bj = 0;
      (op.S.row(best_row).transpose().cwiseQuotient(op.mu)).maxCoeff(&bj);
      f = Eigen::VectorXd::Zero(n);
      f(bj) = 1.0 / op.mu(bj);
    } else if (std::isinf(p)) {
      f = Eigen::VectorXd::Ones(n);
    } else {
      double pp = p / (p - 1.0);
      for (int j = 0; j < n; ++j)
        f(j) = std::pow(op.S(best_row, j) / op.mu(j), pp / p);
      f = normalize_p(op, f, p);
    }
    out.value = best;
    out.witness = f;
    out.method = "dual_exact";
    return out;
  }

  // projected gradient ascent with structured and random restarts
  std::vector<Eigen::VectorXd> starts;
  starts.push_back(Eigen::VectorXd::Ones(n));
  for (int i = 0; i < std::min(n, 16); ++i)
    starts.push_back(Eigen::VectorXd::Unit(n, i));
  {
    auto rep = validate(op);
    if (rep.ergodic) {
      int d = graph_period(op);
      if (d > 1) {
        CyclicDecomposition dec = period_and_classes(op);
        for (int c = 0; c < d; ++c) {
          Eigen::VectorXd ind = Eigen::VectorXd::Zero(n);
          for (int i = 0; i < n; ++i)
            if (dec.cls[static_cast<std::size_t>(i)] == c) ind(i) = 1.0;
          starts.push_back(ind);
        }
      }
    }
  }
  std::mt19937_64 rng(opt.seed);
  for (int r = 0; r < opt.restarts; ++r) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = 2.0 * u01(rng) - 1.0;
    starts.push_back(v);
  }

  std::vector<double> results;
  for (const auto& s : starts) {
    auto [val, wit] = ascend(op, s, p, q, mean_zero, opt);
    results.push_back(val);
    if (val > out.value) {
      out.value = val;
      out.witness = wit;
    }
  }
  std::sort(results.rbegin(), results.rend());
  out.restart_spread =
      results.size() > 1 ? results[0] - results[1] : 0.0;
  out.method = "projected_gradient_ascent";
  out.iterations = static_cast<int>(starts.size());
  return out;
}

NormEstimate opnorm_grid_oracle(const FiniteOp& op, double p, double q,
                                bool mean_zero, int steps) {
  int n = op.n();
  if (n > 3) throw spec_error("opnorm_grid_oracle: only n <= 3");
  NormEstimate out;
  out.method = "grid_oracle";
  auto eval = [&](Eigen::VectorXd dir) {
    if (mean_zero) dir = project_mean_zero(op, dir);
    double nrm = op.fnorm(dir, p);
    if (nrm <= 1e-12) return;
    dir /= nrm;
    double v = objective(op, dir, q);
    if (v > out.value) {
      out.value = v;
      out.witness = dir;
    }
  };
  if (n == 1) {
    eval(Eigen::VectorXd::Ones(1));
    return out;
  }
  if (n == 2) {
    for (int i = 0; i < steps; ++i) {
      double th = two_pi * i / steps;
      Eigen::Vector2d dir(std::cos(th), std::sin(th));
      eval(dir);
    }
    return out;
  }
  int ks = std::max(16, steps / 8);
  for (int a = 0; a <= ks; ++a) {
    double phi = std::numbers::pi * a / ks;
    for (int i = 0; i < steps; ++i) {
      double th = two_pi * i / steps;
      Eigen::Vector3d dir(std::sin(phi) * std::cos(th),
                          std::sin(phi) * std::sin(th), std::cos(phi));
      eval(dir);
    }
  }
  return out;
}

AperiodicityCertificate aperiodicity_certificate(const FiniteOp& op,
                                                 OpnormOptions opt) {
  AperiodicityCertificate cert;
  cert.threshold_4 = std::pow(2.0, 0.25);
  cert.threshold_3 = std::pow(2.0, 1.0 / 6.0);
  cert.graph_d = graph_period(op);
  auto n24 = opnorm(op, 2.0, 4.0, false, opt);
  auto n23 = opnorm(op, 2.0, 3.0, false, opt);
  cert.norm_2_4 = n24.value;
  cert.norm_2_3 = n23.value;
  cert.spread_2_4 = n24.restart_spread;
  cert.spread_2_3 = n23.restart_spread;
  bool c4 = n24.value + 1e-9 < cert.threshold_4 && n24.restart_spread <= 1e-8;
  bool c3 = n23.value + 1e-9 < cert.threshold_3 && n23.restart_spread <= 1e-8;
  cert.certified = c4 || c3;
  cert.note = cert.certified
                  ? (c4 ? "L2->L4 norm below 2^(1/4)" : "L2->L3 norm below 2^(1/6)")
                  : "no norm strictly below its threshold";
  if (cert.certified && cert.graph_d >= 2)
    throw invariant_error(
        "aperiodicity certificate contradicts the graph period");
  return cert;
}

RateFit convergence_rate(const FiniteOp& op, const CyclicDecomposition& dec,
                         int n_max) {
  RateFit out;
  out.n_max = n_max;
  int n = op.n();
  Eigen::MatrixXd Pd = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < dec.d; ++i) Pd = Pd * op.S;
  Eigen::MatrixXd Q = Pd;
  for (int step = 1; step <= n_max; ++step) {
    Eigen::MatrixXd D = Q - dec.Ed;
    double l1 = 0.0;  // max_j sum_i mu_i |D_ij| / mu_j
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += op.mu(i) * std::abs(D(i, j));
      l1 = std::max(l1, s / op.mu(j));
    }
    out.norms_l1.push_back(l1);
    out.norms_l2.push_back(weighted_l2_norm(op, D));
    if (step < n_max) Q = Q * Pd;
  }
  out.rho_gap = out.norms_l2.front();

  // least squares on log ||P^{nd} - E_d||_2, then inflate C to an envelope
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (int i = 0; i < n_max; ++i) {
    double v = out.norms_l2[static_cast<std::size_t>(i)];
    if (v < 1e-13) continue;
    double x = i + 1.0, y = std::log(v);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++cnt;
  }
  if (cnt >= 2) {
    double det = cnt * sxx - sx * sx;
    double slope = (cnt * sxy - sx * sy) / det;
    double inter = (sy - slope * sx) / cnt;
    out.rho = std::exp(slope);
    out.C = std::exp(inter);
    double rss = 0.0;
    for (int i = 0; i < n_max; ++i) {
      double v = out.norms_l2[static_cast<std::size_t>(i)];
      if (v < 1e-13) continue;
      double pred = inter + slope * (i + 1.0);
      rss += (std::log(v) - pred) * (std::log(v) - pred);
    }
    out.fit_residual = std::sqrt(rss / cnt);
    for (int i = 0; i < n_max; ++i) {
      double v = out.norms_l2[static_cast<std::size_t>(i)];
      if (v < 1e-13 || out.rho <= 0.0) continue;
      out.C = std::max(out.C, v / std::pow(out.rho, i + 1.0));
    }
  } else if (cnt == 1) {
    out.rho = out.norms_l2.front();
    out.C = 1.0;
  } else {
    out.rho = 0.0;
    out.C = 0.0;
  }
  return out;
}

EigReport unimodular_eigencheck(const FiniteOp& op,
                                const CyclicDecomposition& dec) {
  EigReport rep;
  int n = op.n();
  Eigen::MatrixXcd Sc = op.S.cast<std::complex<double>>();
  for (int r = 0; r < dec.d; ++r) {
    cplx lambda = e(static_cast<double>(r) / dec.d);
    Eigen::VectorXcd f(n);
    for (int i = 0; i < n; ++i)
      f(i) = std::pow(std::conj(lambda),
                      dec.cls[static_cast<std::size_t>(i)]);
    double resid = (Sc * f - lambda * f).cwiseAbs().maxCoeff();
    rep.max_identity_residual = std::max(rep.max_identity_residual, resid);
  }
  rep.roots_ok = rep.max_identity_residual <= 1e-9;
  if (!rep.roots_ok)
    throw invariant_error(
        "unimodular_eigencheck: P f_lambda = lambda f_lambda failed");

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(Sc, false);
  for (int i = 0; i < n; ++i) {
    cplx lam = es.eigenvalues()(i);
    if (std::abs(lam) > 1.0 - 1e-8) {
      rep.peripheral.push_back(lam);
      bool near_root = false;
      for (int r = 0; r < dec.d; ++r)
        if (std::abs(lam - e(static_cast<double>(r) / dec.d)) < 1e-6)
          near_root = true;
      if (!near_root) rep.spurious_peripheral = true;
    }
  }
  return rep;
}

LimitResiduals limit_residuals(const FiniteOp& op,
                               const CyclicDecomposition& dec,
                               const Eigen::VectorXd& f, int n_steps, int j) {
  int n = op.n();
  int d = dec.d;
  std::vector<double> class_integral(static_cast<std::size_t>(d), 0.0);
  for (int i = 0; i < n; ++i)
    class_integral[static_cast<std::size_t>(
        dec.cls[static_cast<std::size_t>(i)])] += op.mu(i) * f(i);

  auto iterate = [&](const FiniteOp& o) {
    Eigen::VectorXd v = f;
    for (int t = 0; t < n_steps * d + j; ++t) v = o.apply(v);
    return v;
  };
  Eigen::VectorXd prim = iterate(op);
  Eigen::VectorXd du = iterate(op.dual());

  Eigen::VectorXd lim_p(n), lim_d(n);
  for (int i = 0; i < n; ++i) {
    int c = dec.cls[static_cast<std::size_t>(i)];
    lim_p(i) = d * class_integral[static_cast<std::size_t>(
                       ((c - j) % d + d) % d)];
    lim_d(i) = d * class_integral[static_cast<std::size_t>(
                       ((c + j) % d + d) % d)];
  }
  LimitResiduals out;
  Eigen::VectorXd dp = prim - lim_p, dd = du - lim_d;
  out.primal_p1 = op.fnorm(dp, 1.0);
  out.primal_p2 = op.fnorm(dp, 2.0);
  out.dual_p1 = op.fnorm(dd, 1.0);
  out.dual_p2 = op.fnorm(dd, 2.0);
  return out;
}

namespace {

// P 1_B stays an indicator: every row sums over B to ~0 or ~1
std::optional<std::uint32_t> det_step(const FiniteOp& op, std::uint32_t B,
                                      double tol) {
  int n = op.n();
  std::uint32_t next = 0;
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j)
      if (B & (1u << j)) s += op.S(i, j);
    if (std::abs(s - 1.0) <= tol)
      next |= 1u << i;
    else if (std::abs(s) > tol)
      return std::nullopt;
  }
  return next;
}

std::vector<std::uint32_t> deterministic_family(const FiniteOp& op,
                                                double tol) {
  int n = op.n();
  std::uint32_t full = n == 32 ? 0xffffffffu : ((1u << n) - 1u);
  std::unordered_map<std::uint32_t, int> status;  // 1 det, 2 bad
  std::vector<std::uint32_t> result;
  for (std::uint32_t B = 0; B <= full; ++B) {
    if (status.count(B)) {
      if (status[B] == 1) result.push_back(B);
      continue;
    }
    std::vector<std::uint32_t> path;
    std::unordered_map<std::uint32_t, std::size_t> on_path;
    std::uint32_t cur = B;
    int verdict = 0;
    for (;;) {
      auto it = status.find(cur);
      if (it != status.end()) {
        verdict = it->second;
        break;
      }
      if (on_path.count(cur)) {  // closed a cycle: indicators forever
        verdict = 1;
        break;
      }
      on_path[cur] = path.size();
      path.push_back(cur);
      auto nxt = det_step(op, cur, tol);
      if (!nxt) {
        verdict = 2;
        break;
      }
      cur = *nxt;
    }
    for (auto s : path) status[s] = verdict;
    if (status[B] == 1) result.push_back(B);
  }
  std::sort(result.begin(), result.end());
  return result;
}

}  // namespace

DeterministicStructure deterministic_sets(const FiniteOp& op, int n_limit,
                                          int k_max) {
  int n = op.n();
  if (n > n_limit || n > 22)
    throw spec_error("deterministic_sets: state count exceeds the limit");
  double tol = 1e-9;
  DeterministicStructure out;
  out.sigmaD = deterministic_family(op, tol);
  auto dualD = deterministic_family(op.dual(), tol);
  for (auto b : out.sigmaD)
    if (std::binary_search(dualD.begin(), dualD.end(), b))
      out.sigmaU.push_back(b);

  auto rep = validate(op);
  int d = rep.ergodic ? graph_period(op) : 1;

  // P^k-invariant sets for k <= d
  for (int k = 1; k <= d; ++k) {
    std::vector<std::uint32_t> inv;
    for (auto B : out.sigmaD) {
      std::uint32_t cur = B;
      bool ok = true;
      for (int t = 0; t < k; ++t) {
        auto nxt = det_step(op, cur, tol);
        if (!nxt) {
          ok = false;
          break;
        }
        cur = *nxt;
      }
      if (ok && cur == B) inv.push_back(B);
    }
    out.sigma_ik[k] = inv;
  }

  // algebra: closed under complement and union
  std::uint32_t full = (1u << n) - 1u;
  out.algebra_ok = true;
  auto member = [&](std::uint32_t b) {
    return std::binary_search(out.sigmaD.begin(), out.sigmaD.end(), b);
  };
  for (auto b : out.sigmaD)
    if (!member(full & ~b)) out.algebra_ok = false;
  for (auto b1 : out.sigmaD)
    for (auto b2 : out.sigmaD)
      if (!member(b1 | b2)) out.algebra_ok = false;

  if (rep.ergodic) {
    CyclicDecomposition dec = period_and_classes(op);
    std::vector<std::uint32_t> gen;
    for (std::uint32_t mask = 0; mask < (1u << dec.d); ++mask) {
      std::uint32_t b = 0;
      for (int i = 0; i < n; ++i)
        if (mask & (1u << dec.cls[static_cast<std::size_t>(i)])) b |= 1u << i;
      gen.push_back(b);
    }
    std::sort(gen.begin(), gen.end());
    gen.erase(std::unique(gen.begin(), gen.end()), gen.end());
    out.matches_class_algebra = gen == out.sigmaD;
  }

  // Cauchy test on matrix powers: P^{nk} converges iff d | k
  out.divisor_rule_ok = true;
  for (int k = 1; k <= k_max; ++k) {
    Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(n, n);
    for (int t = 0; t < k; ++t) Q = Q * op.S;
    Eigen::MatrixXd A = Q;
    for (int t = 0; t < 8; ++t) A = A * A;  // Q^256
    Eigen::MatrixXd B = A * Q;              // Q^257: consecutive indices
    bool conv = (A - B).cwiseAbs().maxCoeff() < 1e-8;
    out.power_converges[k] = conv;
    if (rep.ergodic && conv != (k % d == 0)) out.divisor_rule_ok = false;
  }
  return out;
}

FiniteOp compose(const FiniteOp& a, const FiniteOp& b) {
  if (a.n() != b.n() || (a.mu - b.mu).cwiseAbs().maxCoeff() > 1e-12)
    throw spec_error("compose: operators live on different spaces");
  FiniteOp r{a.mu, a.S * b.S, a.tol};
  return r;
}

FiniteOp symmetrize(const FiniteOp& a) {
  FiniteOp r{a.mu, 0.5 * (a.S + a.dual().S), a.tol};
  return r;
}

FiniteOp mix(const FiniteOp& a, const FiniteOp& b, double wa) {
  if (a.n() != b.n() || (a.mu - b.mu).cwiseAbs().maxCoeff() > 1e-12)
    throw spec_error("mix: operators live on different spaces");
  if (!(wa >= 0.0 && wa <= 1.0)) throw spec_error("mix: weight outside [0,1]");
  FiniteOp r{a.mu, wa * a.S + (1.0 - wa) * b.S, a.tol};
  return r;
}

FiniteOp gen_example2(int n) {
  if (n < 2 || n % 2 != 0) throw spec_error("example2: n must be even >= 2");
  FiniteOp op;
  op.mu = Eigen::VectorXd::Constant(n, 1.0 / n);
  op.S = Eigen::MatrixXd::Zero(n, n);
  int h = n / 2;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if ((i < h) != (j < h)) op.S(i, j) = 2.0 / n;
  return op;
}

FiniteOp gen_cycle(int d) {
  if (d < 1) throw spec_error("cycle: d must be >= 1");
  FiniteOp op;
  op.mu = Eigen::VectorXd::Constant(d, 1.0 / d);
  op.S = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) op.S(i, (i + 1) % d) = 1.0;
  return op;
}

FiniteOp gen_rank_one(const Eigen::VectorXd& mu) {
  FiniteOp op;
  op.mu = mu;
  auto n = static_cast<int>(mu.size());
  op.S.resize(n, n);
  for (int i = 0; i < n; ++i) op.S.row(i) = mu.transpose();
  return op;
}

namespace {

Eigen::MatrixXd sinkhorn(Eigen::MatrixXd M, bool symmetric) {
  auto n = M.rows();
  for (int it = 0; it < 4000; ++it) {
    for (Eigen::Index i = 0; i < n; ++i) M.row(i) /= M.row(i).sum();
    for (Eigen::Index j = 0; j < n; ++j) M.col(j) /= M.col(j).sum();
    if (symmetric) M = 0.5 * (M + M.transpose());
    double dev = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      dev = std::max(dev, std::abs(M.row(i).sum() - 1.0));
    for (Eigen::Index j = 0; j < n; ++j)
      dev = std::max(dev, std::abs(M.col(j).sum() - 1.0));
    if (dev < 1e-15) break;
  }
  return M;
}

}  // namespace

FiniteOp gen_random_doubly_stochastic(int n, std::uint64_t seed,
                                      bool symmetric) {
  if (n < 1) throw spec_error("random ds: n must be >= 1");
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = 0.1 + u01(rng);
  FiniteOp op;
  op.mu = Eigen::VectorXd::Constant(n, 1.0 / n);
  op.S = sinkhorn(M, symmetric);
  return op;
}

FiniteOp gen_random_block_cyclic(int d, int n, std::uint64_t seed,
                                 double perm_weight, bool symmetric_blocks) {
  if (d < 1 || n < d || n % d != 0)
    throw spec_error("random_block_cyclic: need d >= 1 and d | n");
  int m = n / d;
  std::mt19937_64 rng(seed);
  auto random_block = [&]() {
    Eigen::MatrixXd M(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) M(i, j) = 0.1 + u01(rng);
    Eigen::MatrixXd R = sinkhorn(M, symmetric_blocks);
    if (perm_weight > 0.0) {
      std::vector<int> perm(static_cast<std::size_t>(m));
      std::iota(perm.begin(), perm.end(), 0);
      for (int i = m - 1; i > 0; --i) {
        auto j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
        std::swap(perm[static_cast<std::size_t>(i)],
                  perm[static_cast<std::size_t>(j)]);
      }
      Eigen::MatrixXd P = Eigen::MatrixXd::Zero(m, m);
      for (int i = 0; i < m; ++i) P(i, perm[static_cast<std::size_t>(i)]) = 1.0;
      R = perm_weight * P + (1.0 - perm_weight) * R;
    }
    return R;
  };
  Eigen::MatrixXd shared;
  if (symmetric_blocks) shared = random_block();
  FiniteOp op;
  op.mu = Eigen::VectorXd::Constant(n, 1.0 / n);
  op.S = Eigen::MatrixXd::Zero(n, n);
  for (int b = 0; b < d; ++b) {
    Eigen::MatrixXd R = symmetric_blocks ? shared : random_block();
    int src = b * m, dst = ((b + 1) % d) * m;
    op.S.block(src, dst, m, m) = R;
  }
  return op;
}

}  // namespace spectral

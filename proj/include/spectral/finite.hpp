#pragma once

#include "spectral/common.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace spectral {

// Finite-state bi-stochastic Markov operator: invariant masses mu_i > 0
// with sum 1, row-stochastic S with mu S = mu; (Pf)_i = sum_j S_ij f_j.
struct FiniteOp {
  Eigen::VectorXd mu;
  Eigen::MatrixXd S;
  double tol = 1e-12;

  int n() const { return static_cast<int>(mu.size()); }
  Eigen::VectorXd apply(const Eigen::VectorXd& f) const { return S * f; }
  FiniteOp dual() const;  // S*_ij = mu_j S_ji / mu_i
  // weighted p-norm of a function
  double fnorm(const Eigen::VectorXd& f, double p) const;
  double fnorm(const Eigen::VectorXcd& f, double p) const;
};

struct ValidationReport {
  bool ok = false;
  bool ergodic = false;
  std::vector<std::string> violations;
  std::vector<std::vector<int>> components;  // communicating classes
};
ValidationReport validate(const FiniteOp& op);

// restriction of op to one communicating class, masses renormalized
FiniteOp restrict_to(const FiniteOp& op, const std::vector<int>& states);

struct CyclicDecomposition {
  int d = 1;
  std::vector<int> cls;            // class label per state; A_0 holds state 0
  std::vector<double> class_mass;  // each 1/d up to tol for ergodic op
  Eigen::MatrixXd Ed;              // conditional expectation on the classes
};
CyclicDecomposition period_and_classes(const FiniteOp& op);
Eigen::MatrixXd projection_Ed(const FiniteOp& op,
                              const CyclicDecomposition& dec);
// independent oracle: gcd of all directed cycle lengths in the support graph
int graph_period(const FiniteOp& op);

struct NormEstimate {
  double value = 0.0;
  Eigen::VectorXd witness;
  std::string method;
  double restart_spread = 0.0;  // best minus second-best restart value
  int iterations = 0;
};
struct OpnormOptions {
  int restarts = 64;
  int max_iter = 4000;
  std::uint64_t seed = 12345;
  double tol = 1e-13;
};
// sup ||Pf||_q over ||f||_p = 1 (optionally restricted to mean zero);
// a certified lower bound and heuristic maximum
NormEstimate opnorm(const FiniteOp& op, double p, double q, bool mean_zero,
                    OpnormOptions opt = {});
// brute-force cross-check for n <= 3
NormEstimate opnorm_grid_oracle(const FiniteOp& op, double p, double q,
                                bool mean_zero, int steps = 1440);

struct AperiodicityCertificate {
  bool certified = false;
  double norm_2_4 = 0.0, norm_2_3 = 0.0;
  double threshold_4 = 0.0, threshold_3 = 0.0;  // 2^{1/4}, 2^{1/6}
  double spread_2_4 = 0.0, spread_2_3 = 0.0;
  int graph_d = 0;
  std::string note;
};
// certifies d = 1 when a norm is strictly below its threshold with
// agreeing restarts; cross-checked against the graph period (breach on
// disagreement)
AperiodicityCertificate aperiodicity_certificate(const FiniteOp& op,
                                                 OpnormOptions opt = {});

struct RateFit {
  double C = 0.0, rho = 0.0;
  double fit_residual = 0.0;
  double rho_gap = 0.0;  // ||P^d - E_d||_2 on class-mean-zero functions
  std::vector<double> norms_l1, norms_l2;  // ||P^{nd} - E_d||, n = 1..n_max
  int n_max = 0;
};
RateFit convergence_rate(const FiniteOp& op, const CyclicDecomposition& dec,
                         int n_max);

struct EigReport {
  bool roots_ok = false;             // P f_lambda = lambda f_lambda for all
  double max_identity_residual = 0.0;
  std::vector<std::complex<double>> peripheral;  // |lambda| > 1 - 1e-8
  bool spurious_peripheral = false;
};
EigReport unimodular_eigencheck(const FiniteOp& op,
                                const CyclicDecomposition& dec);

struct LimitResiduals {
  double primal_p1 = 0.0, primal_p2 = 0.0;
  double dual_p1 = 0.0, dual_p2 = 0.0;
};
// ||P^{nd+j} f - d sum_l (int_{A_l} f dmu) 1_{A_{l+j}}||_p and the dual
// analogue with class shift l - j
LimitResiduals limit_residuals(const FiniteOp& op,
                               const CyclicDecomposition& dec,
                               const Eigen::VectorXd& f, int n, int j);

struct DeterministicStructure {
  std::vector<std::uint32_t> sigmaD;              // deterministic sets
  std::map<int, std::vector<std::uint32_t>> sigma_ik;  // P^k-invariant, k<=d
  std::vector<std::uint32_t> sigmaU;              // sigmaD(P) & sigmaD(P*)
  bool algebra_ok = false;
  bool matches_class_algebra = false;
  std::map<int, bool> power_converges;  // P^{nk} Cauchy, k = 1..k_max
  bool divisor_rule_ok = false;         // converges iff d | k
};
DeterministicStructure deterministic_sets(const FiniteOp& op,
                                          int n_limit = 16, int k_max = 12);

FiniteOp compose(const FiniteOp& a, const FiniteOp& b);
FiniteOp symmetrize(const FiniteOp& a);
FiniteOp mix(const FiniteOp& a, const FiniteOp& b, double wa);

// generators
FiniteOp gen_example2(int n);  // kernel 2 on opposite halves, uniform mu
FiniteOp gen_cycle(int d);
FiniteOp gen_rank_one(const Eigen::VectorXd& mu);  // S_ij = mu_j
FiniteOp gen_random_doubly_stochastic(int n, std::uint64_t seed,
                                      bool symmetric = false);
// d cyclic blocks of size n/d; blocks are perm_weight * permutation +
// (1 - perm_weight) * doubly stochastic; symmetric_blocks makes every block
// one shared symmetric doubly stochastic matrix
FiniteOp gen_random_block_cyclic(int d, int n, std::uint64_t seed,
                                 double perm_weight = 0.0,
                                 bool symmetric_blocks = false);

}  // namespace spectral

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bifree/moments.hpp"

namespace bifree {

// C_l and C_r beyond B_l, B_r, given as elements of the model.
struct PresenceContext {
  std::vector<Polynomial> left;
  std::vector<Polynomial> right;
  // Insert Lb(E_ij), Rb(E_ij) into test words (ignored for d = 1).
  bool coefficient_insertions = true;
};

// The conjugate variable is stored as an algebra element whose GNS image is the vector.
struct ConjugateCandidate {
  Polynomial vector;
  Polynomial target;
  Side side = Side::Left;
  std::string label = "X";
};

struct ConjCheckOptions {
  int max_n = 6;
  // Longest test word that contains an Lb/Rb insertion; negative means max_n.
  int max_n_with_coefficients = -1;
};

struct ConjResidual {
  double max_residual = 0.0;
  std::size_t words = 0;
  std::string worst_word;
};

// Max over test words of |tau(Z_1...Z_n xi) - sum_{Z_k = target} tau(rest L_{eta(E(prod V_k))})|
// (R_ for the right version).
ConjResidual conj_residual(const ConjugateCandidate& xi, const CPMap& eta, const PresenceContext& ctx,
                           const MomentFunctional& f, const ConjCheckOptions& opts = {});

// Least-squares candidate in the span of words of degree <= basis_degree in target and context.
struct SolvedCandidate {
  ConjugateCandidate candidate;
  ConjResidual residual;
};
SolvedCandidate solve_conjugate(const Polynomial& target, Side side, const CPMap& eta, const PresenceContext& ctx,
                                const MomentFunctional& f, int basis_degree, const ConjCheckOptions& opts = {});

struct FisherTerm {
  std::optional<ConjugateCandidate> xi;  // nullopt: conjugate variable does not exist
  CPMap eta;
  PresenceContext ctx;
};

struct FisherOptions {
  bool verify = true;
  ConjCheckOptions check;
  double tol = 1e-9;
};

struct FisherResult {
  double value = 0.0;  // +inf when a candidate is absent
  double max_residual = 0.0;
  bool verified = true;
};

double norm_squared(const MomentFunctional& f, const Polynomial& xi);  // tau(xi^* xi)
FisherResult fisher_info(const MomentFunctional& f, const std::vector<FisherTerm>& terms,
                         const FisherOptions& opts = {});

// d = 2 map [a11 a12; a21 a22] -> diag(a22, a11).
CPMap eta_flip();

double h_closed_form(double t, double K1, double K2);

struct EntropyOptions {
  double t_max = 1e3;
  int steps = 2000;  // Simpson intervals on the log grid, rounded up to even
  // Constants of the perturbation bounds K2^2/(K1 + K2 t) <= h(t) <= K3/t; default to K.
  std::optional<double> K1, K2, K3;
};

struct EntropyResult {
  double value = 0.0;  // uses the tail bracket midpoint
  double lower = 0.0;
  double upper = 0.0;
  double integral = 0.0;  // over [0, t_max]
  double tail_lower = 0.0;
  double tail_upper = 0.0;
  double max_integrand = 0.0;  // max |K/(1+t) - Phi(t)| on the grid
  int evaluations = 0;
};

EntropyResult entropy_chi_star(const std::function<double(double)>& fisher_of_t, double K,
                               const EntropyOptions& opts = {});

struct FisherMinReport {
  double lambda = 1.0;
  double lhs = 0.0;          // Phi*({c_l, c_l*} u {c_r, c_r*})
  double rhs = 0.0;          // Phi*(X u Y) over M_2 with the flip map
  double rhs_scalar = 0.0;   // Phi*(X u Y) for the scalar trace tau_2
  double ratio = 0.0;
  double ratio_scalar = 0.0;
  double max_residual = 0.0;
  double cramer_rao_product = 0.0;  // Phi*(X u Y) tau_2(X^2 + Y^2)
  double cramer_rao_bound = 0.0;    // K^2
  bool pass = false;
};

FisherMinReport fisher_minimization_experiment(double lambda = 1.0, const ConjCheckOptions& lhs_check = {4, -1},
                                               const ConjCheckOptions& rhs_check = {4, 2});

struct EntropyReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double expected = 0.0;
  double bracket = 0.0;  // widest chi* bracket involved
  double max_integrand = 0.0;
  double max_residual = 0.0;
  bool pass = false;
};

// Standard semicircular: chi* = ln(2 pi e)/2, the equality case of the maximum-entropy bound.
EntropyReport semicircular_entropy_experiment(const EntropyOptions& opts = {1e6, 4000, {}, {}, {}});
// chi*({c_l, c_l*} u {c_r, c_r*}) against 2 chi*(X u Y) = 2 ln(2 pi e).
EntropyReport circular_pair_entropy_experiment(const EntropyOptions& opts = {1e6, 4000, {}, {}, {}});

}  // namespace bifree

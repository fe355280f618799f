#include "bifree/conjvar.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "bifree/errors.hpp"
#include "bifree/fock.hpp"
#include "bifree/matrix_lift.hpp"

namespace bifree {

namespace {

struct Generator {
  Polynomial element;
  Side side;
  bool target;
  bool coefficient;
  std::string label;
};

std::vector<Generator> test_generators(const ConjugateCandidate& xi, const PresenceContext& ctx, int d) {
  std::vector<Generator> gens;
  gens.push_back({xi.target, xi.side, true, false, xi.label});
  for (std::size_t k = 0; k < ctx.left.size(); ++k)
    gens.push_back({ctx.left[k], Side::Left, false, false, "Cl" + std::to_string(k + 1)});
  for (std::size_t k = 0; k < ctx.right.size(); ++k)
    gens.push_back({ctx.right[k], Side::Right, false, false, "Cr" + std::to_string(k + 1)});
  if (d > 1 && ctx.coefficient_insertions) {
    for (int i = 1; i <= d; ++i)
      for (int j = 1; j <= d; ++j) {
        const std::string e = "E" + std::to_string(i) + std::to_string(j);
        gens.push_back({Polynomial(Monomial{Factor::lb(matrix_unit(d, i, j))}), Side::Left, false, true, "L" + e});
        gens.push_back({Polynomial(Monomial{Factor::rb(matrix_unit(d, i, j))}), Side::Right, false, true, "R" + e});
      }
  }
  return gens;
}

template <class Visit>
void for_each_test_word(const std::vector<Generator>& gens, const ConjCheckOptions& opts, Visit&& visit) {
  if (opts.max_n < 0 || opts.max_n > 8) throw InputError("max_n must be in 0..8");
  const int max_coef = opts.max_n_with_coefficients < 0 ? opts.max_n : opts.max_n_with_coefficients;
  const int g = static_cast<int>(gens.size());
  for (int n = 0; n <= opts.max_n; ++n) {
    std::vector<int> idx(n, 0);
    while (true) {
      bool has_coef = false;
      for (int k : idx) has_coef |= gens[k].coefficient;
      if (!has_coef || n <= max_coef) visit(idx);
      int k = n - 1;
      while (k >= 0 && ++idx[k] == g) idx[k--] = 0;
      if (k < 0) break;
    }
  }
}

// Right-hand side of the conjugate-variable relation for one test word.
cplx relation_rhs(const std::vector<Generator>& gens, const std::vector<int>& idx, Side side, const CPMap& eta,
                  const MomentFunctional& f) {
  const int n = static_cast<int>(idx.size());
  cplx sum = 0.0;
  for (int k = 0; k < n; ++k) {
    if (!gens[idx[k]].target) continue;
    Polynomial inner = Polynomial::one(), rest = Polynomial::one();
    for (int m = 0; m < n; ++m) {
      if (m == k) continue;
      if (m > k && gens[idx[m]].side == side) inner = inner * gens[idx[m]].element;
      else rest = rest * gens[idx[m]].element;
    }
    const BElement b = eta.apply(eval_polynomial(f, inner));
    const Factor coef = side == Side::Left ? Factor::lb(b) : Factor::rb(b);
    sum += tau(f, rest * Polynomial(Monomial{coef}));
  }
  return sum;
}

Polynomial word_element(const std::vector<Generator>& gens, const std::vector<int>& idx) {
  Polynomial w = Polynomial::one();
  for (int k : idx) w = w * gens[k].element;
  return w;
}

std::string word_label(const std::vector<Generator>& gens, const std::vector<int>& idx) {
  std::string s;
  for (int k : idx) s += (s.empty() ? "" : " ") + gens[k].label;
  return s.empty() ? "1" : s;
}

void check_eta(const CPMap& eta, const MomentFunctional& f) {
  if (eta.dim() != f.dim()) throw InputError("covariance map dimension does not match the functional");
}

}  // namespace

ConjResidual conj_residual(const ConjugateCandidate& xi, const CPMap& eta, const PresenceContext& ctx,
                           const MomentFunctional& f, const ConjCheckOptions& opts) {
  check_eta(eta, f);
  CachedFunctional cached(f);
  const auto gens = test_generators(xi, ctx, f.dim());
  ConjResidual out;
  for_each_test_word(gens, opts, [&](const std::vector<int>& idx) {
    const cplx lhs = tau(cached, word_element(gens, idx) * xi.vector);
    const cplx rhs = relation_rhs(gens, idx, xi.side, eta, cached);
    const double r = std::abs(lhs - rhs);
    ++out.words;
    if (r > out.max_residual || out.worst_word.empty()) {
      out.max_residual = std::max(out.max_residual, r);
      out.worst_word = word_label(gens, idx);
    }
  });
  return out;
}

SolvedCandidate solve_conjugate(const Polynomial& target, Side side, const CPMap& eta, const PresenceContext& ctx,
                                const MomentFunctional& f, int basis_degree, const ConjCheckOptions& opts) {
  check_eta(eta, f);
  CachedFunctional cached(f);
  ConjugateCandidate probe{Polynomial(), target, side, "X"};
  const auto gens = test_generators(probe, ctx, f.dim());

  std::vector<Generator> symbol_gens;
  for (const auto& g : gens)
    if (!g.coefficient) symbol_gens.push_back(g);
  std::vector<Polynomial> basis;
  for_each_test_word(symbol_gens, {basis_degree, -1},
                     [&](const std::vector<int>& idx) { basis.push_back(word_element(symbol_gens, idx)); });

  std::vector<Polynomial> rows;
  std::vector<cplx> rhs;
  for_each_test_word(gens, opts, [&](const std::vector<int>& idx) {
    rows.push_back(word_element(gens, idx));
    rhs.push_back(relation_rhs(gens, idx, side, eta, cached));
  });
  Eigen::MatrixXcd A(rows.size(), basis.size());
  Eigen::VectorXcd b(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    b(r) = rhs[r];
    for (std::size_t c = 0; c < basis.size(); ++c) A(r, c) = tau(cached, rows[r] * basis[c]);
  }
  const Eigen::VectorXcd x = A.completeOrthogonalDecomposition().solve(b);
  Polynomial xi;
  for (std::size_t c = 0; c < basis.size(); ++c)
    if (std::abs(x(c)) > 1e-12) xi += x(c) * basis[c];
  SolvedCandidate out{{xi, target, side, "X"}, {}};
  out.residual = conj_residual(out.candidate, eta, ctx, f, opts);
  return out;
}

double norm_squared(const MomentFunctional& f, const Polynomial& xi) {
  return std::real(tau(f, xi.adjoint(f) * xi));
}

FisherResult fisher_info(const MomentFunctional& f, const std::vector<FisherTerm>& terms, const FisherOptions& opts) {
  FisherResult out;
  for (const auto& t : terms) {
    if (!t.xi) {
      out.value = std::numeric_limits<double>::infinity();
      continue;
    }
    if (opts.verify) {
      const auto r = conj_residual(*t.xi, t.eta, t.ctx, f, opts.check);
      out.max_residual = std::max(out.max_residual, r.max_residual);
    }
    out.value += norm_squared(f, t.xi->vector);
  }
  out.verified = !opts.verify || out.max_residual <= opts.tol;
  return out;
}

CPMap eta_flip() { return CPMap(2, {matrix_unit(2, 1, 2), matrix_unit(2, 2, 1)}); }

double h_closed_form(double t, double K1, double K2) {
  if (t < 0 || K1 < 0 || K2 <= 0) throw InputError("h_closed_form needs t >= 0, K1 >= 0, K2 > 0");
  const double denom = K1 + K2 * t;
  if (denom == 0.0) throw InputError("h_closed_form: K1 + K2 t = 0");
  return K2 * K2 / denom;
}

EntropyResult entropy_chi_star(const std::function<double(double)>& fisher_of_t, double K,
                               const EntropyOptions& opts) {
  if (K <= 0) throw InputError("entropy: K must be positive");
  if (opts.t_max <= 0) throw InputError("entropy: t_max must be positive");
  const int N = std::max(2, opts.steps + (opts.steps % 2));
  const double umax = std::log1p(opts.t_max);
  const double h = umax / N;
  EntropyResult out;
  double acc = 0.0;
  for (int k = 0; k <= N; ++k) {
    const double u = k * h;
    const double t = std::expm1(u);
    const double phi = fisher_of_t(t);
    ++out.evaluations;
    if (!std::isfinite(phi)) throw ComputationError("entropy: non-finite Fisher information at t=" + std::to_string(t));
    const double g = K / (1.0 + t) - phi;
    out.max_integrand = std::max(out.max_integrand, std::abs(g));
    const double w = (k == 0 || k == N) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    acc += w * g * (1.0 + t);
  }
  out.integral = acc * h / 3.0;

  const double K1 = opts.K1.value_or(K), K2 = opts.K2.value_or(K), K3 = opts.K3.value_or(K);
  const double T = opts.t_max;
  const double inf = std::numeric_limits<double>::infinity();
  // integrand <= K/(1+t) - K2^2/(K1+K2 t); >= K/(1+t) - K3/t
  out.tail_upper = std::abs(K2 - K) < 1e-12 ? K * std::log((K1 + K * T) / (K * (1.0 + T))) : inf;
  out.tail_lower = std::abs(K3 - K) < 1e-12 ? -K * std::log1p(1.0 / T) : -inf;

  const double base = 0.5 * K * std::log(2.0 * std::numbers::pi * std::numbers::e);
  out.lower = base + 0.5 * (out.integral + out.tail_lower);
  out.upper = base + 0.5 * (out.integral + out.tail_upper);
  out.value = std::isfinite(out.lower) && std::isfinite(out.upper)
                  ? base + 0.5 * (out.integral + 0.5 * (out.tail_lower + out.tail_upper))
                  : base + 0.5 * out.integral;
  return out;
}

FisherMinReport fisher_minimization_experiment(double lambda, const ConjCheckOptions& lhs_check,
                                               const ConjCheckOptions& rhs_check) {
  if (lambda == 0.0) throw InputError("scaling must be nonzero");
  FisherMinReport r;
  r.lambda = lambda;
  const std::shared_ptr<const MomentFunctional> circ = make_circular_pair();
  auto S = [&](const char* name) { return cplx(lambda) * Polynomial::sym(name); };

  std::vector<FisherTerm> lhs_terms;
  const std::vector<std::pair<std::string, std::string>> pairs = {
      {"c_l", "c_l*"}, {"c_l*", "c_l"}, {"c_r", "c_r*"}, {"c_r*", "c_r"}};
  for (const auto& [a, b] : pairs) {
    const Side side = circ->symbol(a).side;
    PresenceContext ctx;
    (side == Side::Left ? ctx.left : ctx.right).push_back(S(b.c_str()));
    auto& other = side == Side::Left ? ctx.right : ctx.left;
    for (const char* o : side == Side::Left ? std::array{"c_r", "c_r*"} : std::array{"c_l", "c_l*"})
      other.push_back(S(o));
    lhs_terms.push_back({ConjugateCandidate{cplx(1.0 / lambda) * Polynomial::sym(b), S(a.c_str()), side, a},
                         CPMap::identity(1), ctx});
  }
  const auto lhs = fisher_info(*circ, lhs_terms, {true, lhs_check, 1e-9});

  const std::shared_ptr<const MomentFunctional> lift = make_xy_lift(circ, "c_l", "c_l*", "c_r", "c_r*", lambda);
  auto lifted_terms = [&](const CPMap& eta) {
    const cplx inv = 1.0 / (lambda * lambda);
    PresenceContext cx, cy;
    cx.right.push_back(Polynomial::sym("Y"));
    cy.left.push_back(Polynomial::sym("X"));
    return std::vector<FisherTerm>{
        {ConjugateCandidate{inv * Polynomial::sym("X"), Polynomial::sym("X"), Side::Left, "X"}, eta, cx},
        {ConjugateCandidate{inv * Polynomial::sym("Y"), Polynomial::sym("Y"), Side::Right, "Y"}, eta, cy}};
  };
  const auto rhs = fisher_info(*lift, lifted_terms(eta_flip()), {true, rhs_check, 1e-9});
  const TracedFunctional traced(lift);
  const auto rhs_scalar = fisher_info(traced, lifted_terms(CPMap::identity(1)), {true, {6, -1}, 1e-9});

  r.lhs = lhs.value;
  r.rhs = rhs.value;
  r.rhs_scalar = rhs_scalar.value;
  r.ratio = r.lhs / r.rhs;
  r.ratio_scalar = r.lhs / r.rhs_scalar;
  r.max_residual = std::max({lhs.max_residual, rhs.max_residual, rhs_scalar.max_residual});
  const double second = std::real(tau(*lift, Polynomial::sym("X") * Polynomial::sym("X") +
                                                  Polynomial::sym("Y") * Polynomial::sym("Y")));
  r.cramer_rao_product = r.rhs * second;
  const double K = 2.0 * std::real(trace_d(eta_flip().apply(identity(2))));
  r.cramer_rao_bound = K * K;
  r.pass = lhs.verified && rhs.verified && rhs_scalar.verified && std::abs(r.ratio - 2.0) <= 1e-6 &&
           std::abs(r.ratio_scalar - 2.0) <= 1e-6;
  return r;
}

namespace {

// X_t = s_1 + sqrt(t) s_2 over scalar B.
std::shared_ptr<FockModel> perturbed_semicircular(double t) {
  std::map<std::pair<int, int>, CPMap> cov = {{{1, 1}, CPMap::identity(1)}, {{2, 2}, CPMap::identity(1)}};
  FockOperator op = left_semicircular(1);
  if (t > 0) op = op + left_semicircular(2, std::sqrt(t));
  std::vector<FockModel::Entry> e = {{{"X", Side::Left, false, "X", ""}, op}};
  return std::make_shared<FockModel>(FockSpace(1, std::move(cov)), std::move(e));
}

std::vector<FisherTerm> circular_terms(double t) {
  std::vector<FisherTerm> terms;
  const std::vector<std::pair<std::string, std::string>> pairs = {
      {"c_l", "c_l*"}, {"c_l*", "c_l"}, {"c_r", "c_r*"}, {"c_r*", "c_r"}};
  for (const auto& [a, b] : pairs) {
    const bool left = a[2] == 'l';
    PresenceContext ctx;
    (left ? ctx.left : ctx.right).push_back(Polynomial::sym(b));
    for (const char* o : left ? std::array{"c_r", "c_r*"} : std::array{"c_l", "c_l*"})
      (left ? ctx.right : ctx.left).push_back(Polynomial::sym(o));
    terms.push_back({ConjugateCandidate{cplx(1.0 / (1.0 + t)) * Polynomial::sym(b), Polynomial::sym(a),
                                        left ? Side::Left : Side::Right, a},
                     CPMap::identity(1), ctx});
  }
  return terms;
}

std::vector<FisherTerm> lifted_terms(double t) {
  PresenceContext cx, cy;
  cx.right.push_back(Polynomial::sym("Y"));
  cy.left.push_back(Polynomial::sym("X"));
  const cplx s = 1.0 / (1.0 + t);
  return {{ConjugateCandidate{s * Polynomial::sym("X"), Polynomial::sym("X"), Side::Left, "X"}, eta_flip(), cx},
          {ConjugateCandidate{s * Polynomial::sym("Y"), Polynomial::sym("Y"), Side::Right, "Y"}, eta_flip(), cy}};
}

}  // namespace

EntropyReport semicircular_entropy_experiment(const EntropyOptions& opts) {
  EntropyReport r;
  r.name = "semicircular-max";
  for (double t : {0.0, 1.0, 10.0}) {
    auto m = perturbed_semicircular(t);
    ConjugateCandidate xi{cplx(1.0 / (1.0 + t)) * Polynomial::sym("X"), Polynomial::sym("X"), Side::Left, "X"};
    r.max_residual = std::max(r.max_residual, conj_residual(xi, CPMap::identity(1), {}, *m, {6, -1}).max_residual);
  }
  const auto res = entropy_chi_star(
      [](double t) {
        auto m = perturbed_semicircular(t);
        return norm_squared(*m, cplx(1.0 / (1.0 + t)) * Polynomial::sym("X"));
      },
      1.0, opts);
  const double K1 = std::real(tau(*perturbed_semicircular(0.0), Polynomial::sym("X") * Polynomial::sym("X")));
  r.lhs = res.value;
  r.rhs = 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * K1);  // max-entropy bound, K = 1
  r.expected = 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e);
  r.bracket = res.upper - res.lower;
  r.max_integrand = res.max_integrand;
  r.pass = std::abs(r.lhs - r.expected) <= 1e-4 && std::abs(r.lhs - r.rhs) <= 1e-4 && r.bracket <= 1e-4 &&
           r.max_integrand <= 1e-9 && r.max_residual <= 1e-9;
  return r;
}

EntropyReport circular_pair_entropy_experiment(const EntropyOptions& opts) {
  EntropyReport r;
  r.name = "circular-pair";
  for (double t : {0.0, 1.0}) {
    auto circ = make_circular_pair(t);
    const auto lhs = fisher_info(*circ, circular_terms(t), {true, {4, -1}, 1e-9});
    const auto lift = make_xy_lift(circ, "c_l", "c_l*", "c_r", "c_r*");
    const auto rhs = fisher_info(*lift, lifted_terms(t), {true, {3, 2}, 1e-9});
    r.max_residual = std::max({r.max_residual, lhs.max_residual, rhs.max_residual});
  }
  const auto lhs = entropy_chi_star(
      [](double t) {
        auto circ = make_circular_pair(t);
        return fisher_info(*circ, circular_terms(t), {false, {}, 1e-9}).value;
      },
      4.0, opts);
  const auto rhs = entropy_chi_star(
      [](double t) {
        auto lift = make_xy_lift(make_circular_pair(t), "c_l", "c_l*", "c_r", "c_r*");
        return fisher_info(*lift, lifted_terms(t), {false, {}, 1e-9}).value;
      },
      2.0, opts);
  r.lhs = lhs.value;
  r.rhs = rhs.value;
  r.expected = 2.0 * std::log(2.0 * std::numbers::pi * std::numbers::e);
  r.bracket = std::max(lhs.upper - lhs.lower, 2.0 * (rhs.upper - rhs.lower));
  r.max_integrand = std::max(lhs.max_integrand, rhs.max_integrand);
  r.pass = std::abs(r.lhs - 2.0 * r.rhs) <= 1e-4 && std::abs(r.lhs - r.expected) <= 1e-4 && r.bracket <= 1e-4 &&
           r.max_integrand <= 1e-9 && r.max_residual <= 1e-9;
  return r;
}

}  // namespace bifree

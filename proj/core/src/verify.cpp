#include "bifree/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bifree/bnc.hpp"
#include "bifree/conjvar.hpp"
#include "bifree/errors.hpp"
#include "bifree/fock.hpp"
#include "bifree/matrix_lift.hpp"
#include "bifree/moments.hpp"

namespace bifree {

BElement random_belement(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> g(0.0, 1.0);
  BElement b(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) b(i, j) = cplx(g(rng), g(rng));
  return b;
}

CPMap random_cp_map(std::mt19937_64& rng, int d, int kraus) {
  std::vector<BElement> k;
  for (int i = 0; i < kraus; ++i) k.push_back(0.5 * random_belement(rng, d));
  return CPMap(d, std::move(k));
}

namespace {

ChiWord random_chi(std::mt19937_64& rng, int n) {
  std::vector<Side> s(n);
  for (auto& x : s) x = rng() & 1 ? Side::Right : Side::Left;
  return ChiWord(s);
}

template <class T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& v) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

std::string sci(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

struct Check {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "FAILED " << what << "; ";
    }
  }
};

CriterionResult lattice_counts(const VerifyOptions& o) {
  Check c;
  std::mt19937_64 rng(o.seed);
  const auto t0 = std::chrono::steady_clock::now();
  for (int n = 1; n <= 8; ++n)
    for (int k = 0; k < 3; ++k) {
      const ChiWord chi = random_chi(rng, n);
      const auto count = enumerate_bnc(chi).size();
      c.require(count == catalan(n), "|BNC(" + chi.str() + ")|=" + std::to_string(count));
    }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.require(secs < 10.0, "runtime " + std::to_string(secs) + "s");
  c.detail << "Catalan counts n=1..8, 3 chi each; " << secs << "s";
  return {1, "lattice counts", c.pass, c.detail.str()};
}

CriterionResult mobius(const VerifyOptions& o) {
  Check c;
  std::mt19937_64 rng(o.seed + 2);
  std::size_t pairs = 0;
  for (int n = 1; n <= 6; ++n) {
    const ChiWord chi = random_chi(rng, n);
    const auto all = enumerate_bnc(chi);
    for (const auto& sigma : all)
      for (const auto& pi : all) {
        if (!lattice_leq(sigma, pi)) continue;
        std::int64_t s = 0, dual = 0;
        for (const auto& tau : all)
          if (lattice_leq(sigma, tau) && lattice_leq(tau, pi)) {
            s += mobius_bnc(tau, pi);
            dual += mobius_bnc(sigma, tau);
          }
        const std::int64_t want = sigma == pi ? 1 : 0;
        ++pairs;
        if (s != want || dual != want) c.require(false, "recursion at " + sigma.str() + " <= " + pi.str());
      }
  }
  for (int n = 1; n <= 7; ++n) {
    const ChiWord chi = random_chi(rng, n);
    const auto mu = mobius_bnc(BncPartition::zero(chi), BncPartition::one(chi));
    const std::int64_t want = (n % 2 ? 1 : -1) * static_cast<std::int64_t>(catalan(n - 1));
    c.require(mu == want, "mu(0,1) n=" + std::to_string(n) + " = " + std::to_string(mu));
  }
  int factor_ok = 0;
  for (int t = 0; t < o.trials; ++t) {
    const int n = std::uniform_int_distribution<int>(2, 6)(rng);
    const ChiWord chi = random_chi(rng, n);
    const auto all = enumerate_bnc(chi);
    const BncPartition& pi = pick(rng, all);
    std::vector<BncPartition> below;
    for (const auto& s : all)
      if (lattice_leq(s, pi)) below.push_back(s);
    const BncPartition& sigma = pick(rng, below);
    // random grouping of pi's blocks into unions V_1..V_m
    const int m = std::uniform_int_distribution<int>(1, pi.block_count())(rng);
    std::vector<std::vector<int>> groups(m);
    for (const auto& b : pi.blocks()) {
      auto& g = groups[std::uniform_int_distribution<int>(0, m - 1)(rng)];
      g.insert(g.end(), b.begin(), b.end());
    }
    std::int64_t prod = 1;
    for (const auto& v : groups)
      if (!v.empty()) prod *= mobius_bnc(restrict_to(sigma, v), restrict_to(pi, v));
    if (prod == mobius_bnc(sigma, pi)) ++factor_ok;
    else c.require(false, "factorization at " + sigma.str() + " <= " + pi.str());
  }
  c.detail << pairs << " recursion pairs n<=6; mu(0,1) n<=7; factorization " << factor_ok << "/" << o.trials;
  return {2, "moebius", c.pass, c.detail.str()};
}

CriterionResult inversion(const VerifyOptions& o) {
  Check c;
  std::mt19937_64 rng(o.seed + 3);
  double worst = 0.0;
  int cases = 0;
  for (int d = 1; d <= 2; ++d)
    for (int n = 1; n <= 6; ++n)
      for (int k = 0; k < 4; ++k) {
        const ChiWord chi = random_chi(rng, n);
        PartitionTable table;
        for (auto& p : enumerate_bnc(chi)) table.push_back({p, random_belement(rng, d)});
        const auto back = moments_from_cumulants(cumulants_from_moments(table));
        const auto fwd = cumulants_from_moments(moments_from_cumulants(table));
        for (std::size_t i = 0; i < table.size(); ++i)
          worst = std::max({worst, max_abs(back[i].value - table[i].value), max_abs(fwd[i].value - table[i].value)});
        ++cases;
      }
  c.require(worst <= 1e-10, "round trip error " + sci(worst));
  c.detail << cases << " random tables (d<=2, n<=6), max error " << sci(worst);
  return {3, "moebius inversion round trip", c.pass, c.detail.str()};
}

CriterionResult fock_exactness(const VerifyOptions&) {
  Check c;
  auto model = make_bisemicircular({CPMap::identity(1)}, {CPMap::identity(1)});
  double err = 0.0;
  const double want[] = {1, 2, 5};
  for (int k = 1; k <= 3; ++k) {
    Monomial w(2 * k, Factor::sym("S1"));
    err = std::max(err, std::abs(model->eval(w)(0, 0) - want[k - 1]));
  }
  c.require(err <= 1e-12, "semicircular moments error " + sci(err));
  // Truncation independence with auto-extension disabled.
  const FockOperatorWord words[] = {
      {FockFactor::lstar(1), FockFactor::lstar(1), FockFactor::rstar(2), FockFactor::l(1), FockFactor::r(2),
       FockFactor::l(1)},
      {FockFactor::lstar(1), FockFactor::rstar(2), FockFactor::r(2), FockFactor::l(1)},
  };
  double spread = 0.0;
  bool overflow_detected = true;
  for (const auto& w : words) {
    const int n = static_cast<int>(w.size());
    std::map<std::pair<int, int>, CPMap> cov = {{{1, 1}, CPMap::identity(1)}, {{2, 2}, CPMap::identity(1)}};
    const BElement ref = FockSpace(1, cov, n, false).expectation(w);
    for (int N = n; N <= n + 4; ++N) spread = std::max(spread, max_abs(FockSpace(1, cov, N, false).expectation(w) - ref));
    try {
      FockSpace(1, cov, 0, false).expectation(w);
      overflow_detected = false;
    } catch (const ComputationError&) {
    }
  }
  c.require(spread <= 1e-12, "truncation dependence " + sci(spread));
  c.require(overflow_detected, "overflow not reported for N < depth");
  c.detail << "m2,m4,m6 error " << sci(err) << "; spread over N>=n " << sci(spread);
  return {4, "fock exactness", c.pass, c.detail.str()};
}

CriterionResult theorem63(const VerifyOptions& o) {
  Check c;
  std::mt19937_64 rng(o.seed + 5);
  auto model = make_bisemicircular({eta_flip()}, {random_cp_map(rng, 2)});
  CachedFunctional f(*model);
  double pair_err = 0.0;
  const ChiWord ll = ChiWord::parse("ll");
  for (int k = 0; k < 50; ++k) {
    const BElement b = random_belement(rng, 2);
    const BElement kap = cumulant_pi(f, BncPartition::one(ll), {{Factor::sym("S1"), Factor::lb(b)}, {Factor::sym("S1")}});
    pair_err = std::max(pair_err, max_abs(kap - eta_flip().apply(b)));
  }
  c.require(pair_err <= 1e-9, "kappa_ll(S L_b, S) vs eta(b): " + sci(pair_err));

  double other = 0.0;
  std::size_t tested = 0;
  for (int n : {1, 3, 4, 5})
    for (int mask = 0; mask < (1 << n); ++mask) {
      std::vector<Side> sides(n);
      std::vector<Monomial> ops(n);
      for (int k = 0; k < n; ++k) {
        const bool right = (mask >> k) & 1;
        sides[k] = right ? Side::Right : Side::Left;
        ops[k] = right ? Monomial{Factor::sym("D1"), Factor::rb(random_belement(rng, 2))}
                       : Monomial{Factor::sym("S1"), Factor::lb(random_belement(rng, 2))};
      }
      other = std::max(other, max_abs(cumulant_pi(f, BncPartition::one(ChiWord(sides)), ops)));
      ++tested;
    }
  c.require(other <= 1e-9, "orders 1,3-5: " + sci(other));

  double mixed = 0.0;
  for (int k = 0; k < 20; ++k) {
    mixed = std::max(mixed, max_abs(cumulant_pi(f, BncPartition::one(ChiWord::parse("lr")),
                                                {{Factor::sym("S1"), Factor::lb(random_belement(rng, 2))},
                                                 {Factor::sym("D1")}})));
    mixed = std::max(mixed, max_abs(cumulant_pi(f, BncPartition::one(ChiWord::parse("rl")),
                                                {{Factor::sym("D1"), Factor::rb(random_belement(rng, 2))},
                                                 {Factor::sym("S1")}})));
  }
  c.require(mixed <= 1e-9, "mixed order 2: " + sci(mixed));
  c.detail << "kappa_ll err " << sci(pair_err) << "; " << tested << " cumulants of order 1,3-5 max " << sci(other)
           << "; mixed order-2 max " << sci(mixed);
  return {5, "bi-semicircular cumulants (d=2, flip)", c.pass, c.detail.str()};
}

std::shared_ptr<FockModel> two_pair_model() {
  std::map<std::pair<int, int>, CPMap> cov;
  for (int k = 1; k <= 4; ++k) cov.emplace(std::make_pair(k, k), CPMap::identity(1).scaled(0.5 * k));
  std::vector<FockModel::Entry> e = {
      {{"S1", Side::Left, false, "A", ""}, left_semicircular(1)},
      {{"D1", Side::Right, false, "A", ""}, right_semicircular(2)},
      {{"S2", Side::Left, false, "B", ""}, left_semicircular(3)},
      {{"D2", Side::Right, false, "B", ""}, right_semicircular(4)},
  };
  return std::make_shared<FockModel>(FockSpace(1, std::move(cov)), std::move(e));
}

CriterionResult bifree_detector(const VerifyOptions& o) {
  Check c;
  std::mt19937_64 rng(o.seed + 6);
  const auto scalar = bifree_test(*two_pair_model(), 6);
  c.require(scalar.pass, "two scalar pairs: max " + sci(scalar.max_residual));

  auto m2 = make_bisemicircular({random_cp_map(rng, 2), eta_flip()}, {random_cp_map(rng, 2)});
  const auto op = bifree_test(*m2, 4);
  c.require(op.pass, "d=2 families: max " + sci(op.max_residual));

  const double planted = 0.7;
  std::map<std::pair<int, int>, CPMap> cov = {{{1, 1}, CPMap::identity(1).scaled(planted)}};
  std::vector<FockModel::Entry> e = {{{"A", Side::Left, false, "a", ""}, left_semicircular(1)},
                                     {{"B", Side::Right, false, "b", ""}, right_semicircular(1)}};
  const FockModel correlated(FockSpace(1, std::move(cov)), std::move(e));
  const auto bad = bifree_test(correlated, 4);
  c.require(!bad.pass, "correlated family not detected");
  c.require(std::abs(bad.max_by_order[2] - planted) <= 1e-9,
            "order-2 mixed cumulant " + sci(bad.max_by_order[2]) + " vs planted " + sci(planted));
  c.detail << "scalar pairs order<=6: " << scalar.tested << " mixed cumulants, max " << sci(scalar.max_residual)
           << "; d=2 order<=4: " << op.tested << ", max " << sci(op.max_residual)
           << "; correlated: order-2 = " << bad.max_by_order[2];
  return {6, "bi-freeness detector", c.pass, c.detail.str()};
}

std::shared_ptr<FockModel> scaled_semicircular(double lambda) {
  std::map<std::pair<int, int>, CPMap> cov = {{{1, 1}, CPMap::identity(1)}};
  std::vector<FockModel::Entry> e = {{{"X", Side::Left, false, "X", ""}, left_semicircular(1, lambda)}};
  return std::make_shared<FockModel>(FockSpace(1, std::move(cov)), std::move(e));
}

CriterionResult conjugate_variables(const VerifyOptions&) {
  Check c;
  const auto s = make_bisemicircular({CPMap::identity(1)}, {});
  const ConjugateCandidate xi{Polynomial::sym("S1"), Polynomial::sym("S1"), Side::Left, "S"};
  const auto r = conj_residual(xi, CPMap::identity(1), {}, *s, {6, -1});
  c.require(r.max_residual <= 1e-9, "J(S)=S residual " + sci(r.max_residual));

  const auto op = make_bisemicircular({eta_flip()}, {CPMap::identity(2)});
  PresenceContext ctx;
  ctx.right.push_back(Polynomial::sym("D1"));
  const auto rop = conj_residual({Polynomial::sym("S1"), Polynomial::sym("S1"), Side::Left, "S"}, eta_flip(), ctx,
                                 *op, {5, 3});
  c.require(rop.max_residual <= 1e-9, "J(S)=S over M_2 residual " + sci(rop.max_residual));

  double scale_res = 0.0;
  for (double lambda : {0.5, 2.0}) {
    const auto m = scaled_semicircular(lambda);
    const ConjugateCandidate x{cplx(1.0 / (lambda * lambda)) * Polynomial::sym("X"), Polynomial::sym("X"),
                               Side::Left, "X"};
    scale_res = std::max(scale_res, conj_residual(x, CPMap::identity(1), {}, *m, {6, -1}).max_residual);
  }
  c.require(scale_res <= 1e-9, "scaling residual " + sci(scale_res));

  const auto fi = fisher_info(*s, {{xi, CPMap::identity(1), {}}}, {true, {6, -1}, 1e-9});
  const double second = std::real(tau(*s, Polynomial::sym("S1") * Polynomial::sym("S1")));
  c.require(fi.verified && std::abs(fi.value - 1.0) <= 1e-9, "Phi*(s) = " + std::to_string(fi.value));
  c.require(std::abs(fi.value * second - 1.0) <= 1e-9, "Cramer-Rao product " + std::to_string(fi.value * second));
  c.detail << "J(S) residual " << sci(r.max_residual) << " (" << r.words << " words), M_2 " << sci(rop.max_residual)
           << "; scaling " << sci(scale_res) << "; Phi*(s)=" << fi.value << ", Phi* tau(s^2)=" << fi.value * second;
  return {7, "conjugate variables", c.pass, c.detail.str()};
}

CriterionResult perturbation(const VerifyOptions&) {
  Check c;
  double err = 0.0, res = 0.0;
  for (double t : {0.0, 0.5, 1.0, 2.0, 10.0}) {
    std::map<std::pair<int, int>, CPMap> cov = {{{1, 1}, CPMap::identity(1)}, {{2, 2}, CPMap::identity(1)}};
    std::vector<FockModel::Entry> e = {
        {{"X", Side::Left, false, "X", ""}, left_semicircular(1) + left_semicircular(2, std::sqrt(t))}};
    const FockModel m(FockSpace(1, std::move(cov)), std::move(e));
    const ConjugateCandidate xi{cplx(1.0 / (1.0 + t)) * Polynomial::sym("X"), Polynomial::sym("X"), Side::Left, "X"};
    const auto fi = fisher_info(m, {{xi, CPMap::identity(1), {}}}, {true, {6, -1}, 1e-9});
    res = std::max(res, fi.max_residual);
    err = std::max(err, std::abs(fi.value - h_closed_form(t, 1.0, 1.0)));
  }
  c.require(res <= 1e-9, "residual " + sci(res));
  c.require(err <= 1e-9, "h(t) mismatch " + sci(err));
  c.detail << "t in {0,0.5,1,2,10}: |Phi* - 1/(1+t)| max " << sci(err) << ", residual " << sci(res);
  return {8, "perturbation law", c.pass, c.detail.str()};
}

CriterionResult lift_experiment(const VerifyOptions&) {
  Check c;
  const std::shared_ptr<const MomentFunctional> circ = make_circular_pair();
  const auto lift = make_xy_lift(circ, "c_l", "c_l*", "c_r", "c_r*");
  const TracedFunctional tau2(lift);
  double err = 0.0;
  for (int n = 1; n <= 6; ++n)
    for (const char* s : {"X", "Y"}) {
      const double want = n % 2 ? 0.0 : static_cast<double>(catalan(n / 2));
      err = std::max(err, std::abs(tau2.eval(Monomial(n, Factor::sym(s)))(0, 0) - want));
    }
  double parity = 0.0;
  for (int n = 1; n <= 6; ++n)
    for (int mask = 0; mask < (1 << n); ++mask) {
      std::vector<Side> sides(n);
      Monomial w;
      for (int k = 0; k < n; ++k) {
        const bool right = (mask >> k) & 1;
        sides[k] = right ? Side::Right : Side::Left;
        w.push_back(Factor::sym(right ? "Y" : "X"));
      }
      parity = std::max(parity, std::abs(tau2.eval(w)(0, 0) - lift_parity_moment(*circ, ChiWord(sides), "c_l", "c_l*",
                                                                                 "c_r", "c_r*")));
    }
  c.require(err <= 1e-9, "semicircular moments of X, Y: " + sci(err));
  c.require(parity <= 1e-9, "parity law: " + sci(parity));
  const auto aaf = aaf_check(*circ, "c_l", "c_l*", "c_r", "c_r*", 6);
  c.require(aaf.pass, "aaf discrepancy " + sci(aaf.max_discrepancy));
  const auto fm = fisher_minimization_experiment();
  c.require(fm.pass, "fisher minimization ratio " + std::to_string(fm.ratio));
  c.require(std::abs(fm.lhs - 4.0) <= 1e-6 && std::abs(fm.rhs - 2.0) <= 1e-6, "LHS/RHS values");
  c.detail << "X,Y moments err " << sci(err) << ", parity " << sci(parity) << "; aaf max " << sci(aaf.max_discrepancy)
           << "; LHS " << fm.lhs << " RHS " << fm.rhs << " (scalar " << fm.rhs_scalar << ") ratio " << fm.ratio
           << ", residual " << sci(fm.max_residual);
  return {9, "matrix lift and Fisher minimization", c.pass, c.detail.str()};
}

CriterionResult entropy(const VerifyOptions&) {
  Check c;
  const auto semi = semicircular_entropy_experiment();
  c.require(semi.pass, "semicircular chi* = " + std::to_string(semi.lhs));
  const auto circ = circular_pair_entropy_experiment();
  c.require(circ.pass, "circular pair chi* = " + std::to_string(circ.lhs));
  c.detail.precision(10);
  c.detail << "semicircular " << semi.lhs << " (want " << semi.expected << ", integrand max "
           << sci(semi.max_integrand) << "); circular pair " << circ.lhs << " vs 2chi*(XuY) " << 2 * circ.rhs
           << " (want " << circ.expected << ", bracket " << sci(circ.bracket) << ")";
  return {10, "entropy", c.pass, c.detail.str()};
}

CriterionResult product_expansion(const VerifyOptions& o) {
  Check c;
  std::mt19937_64 rng(o.seed + 11);
  std::map<std::pair<int, int>, CPMap> cov = {{{1, 1}, CPMap::identity(1)},
                                              {{2, 2}, CPMap::identity(1).scaled(0.5)},
                                              {{3, 3}, CPMap::identity(1).scaled(2.0)}};
  std::vector<FockModel::Entry> e = {{{"S1", Side::Left, false, "S1", ""}, left_semicircular(1)},
                                     {{"S2", Side::Left, false, "S2", ""}, left_semicircular(2)},
                                     {{"D1", Side::Right, false, "D1", ""}, right_semicircular(3)}};
  const FockModel scalar(FockSpace(1, std::move(cov)), std::move(e));
  const auto op = make_bisemicircular({random_cp_map(rng, 2)}, {random_cp_map(rng, 2)});

  double worst = 0.0;
  int cases = 0;
  for (int t = 0; t < 100; ++t) {
    const bool matrix = t % 2;
    const MomentFunctional& f = matrix ? static_cast<const MomentFunctional&>(*op) : scalar;
    const int d = f.dim();
    const int groups = std::uniform_int_distribution<int>(1, 3)(rng);
    std::vector<int> sizes;
    std::vector<Side> sides;
    std::vector<Monomial> ops;
    int total = 0;
    for (int g = 0; g < groups; ++g) {
      const int k = std::uniform_int_distribution<int>(1, std::max(1, std::min(3, 6 - total - (groups - g - 1))))(rng);
      const bool last = g + 1 == groups;
      const Side group_side = rng() & 1 ? Side::Right : Side::Left;
      for (int i = 0; i < k; ++i) {
        const Side s = last ? (rng() & 1 ? Side::Right : Side::Left) : group_side;
        sides.push_back(s);
        Monomial m;
        if (s == Side::Left) {
          m.push_back(Factor::sym(matrix ? "S1" : (rng() & 1 ? "S1" : "S2")));
          if (matrix && (rng() & 1)) m.push_back(Factor::lb(random_belement(rng, d)));
        } else {
          m.push_back(Factor::sym("D1"));
          if (matrix && (rng() & 1)) m.insert(m.begin(), Factor::rb(random_belement(rng, d)));
        }
        ops.push_back(std::move(m));
      }
      sizes.push_back(k);
      total += k;
    }
    const auto r = product_cumulant_expand(f, ChiWord(sides), sizes, ops);
    worst = std::max(worst, r.residual);
    ++cases;
  }
  c.require(worst <= 1e-9, "residual " + sci(worst));
  c.detail << cases << " randomized instances (scalar and d=2), max residual " << sci(worst);
  return {11, "product-entry cumulant expansion", c.pass, c.detail.str()};
}

}  // namespace

CriterionResult run_criterion(int id, const VerifyOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  switch (id) {
    case 1: r = lattice_counts(opts); break;
    case 2: r = mobius(opts); break;
    case 3: r = inversion(opts); break;
    case 4: r = fock_exactness(opts); break;
    case 5: r = theorem63(opts); break;
    case 6: r = bifree_detector(opts); break;
    case 7: r = conjugate_variables(opts); break;
    case 8: r = perturbation(opts); break;
    case 9: r = lift_experiment(opts); break;
    case 10: r = entropy(opts); break;
    case 11: r = product_expansion(opts); break;
    default: throw InputError("criterion id must be in 1..11");
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::vector<CriterionResult> run_acceptance(const VerifyOptions& opts,
                                            const std::function<void(const CriterionResult&)>& on_result) {
  std::vector<CriterionResult> out;
  double total = 0.0;
  for (int id = 1; id < kCriterionCount; ++id) {
    CriterionResult r;
    try {
      r = run_criterion(id, opts);
    } catch (const std::exception& e) {
      r = {id, "criterion " + std::to_string(id), false, std::string("exception: ") + e.what(), 0.0};
    }
    total += r.seconds;
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  }
  CriterionResult budget{kCriterionCount, "runtime budget", total < 300.0,
                         "criteria 1-11 took " + std::to_string(total) + "s (limit 300s)", total};
  if (on_result) on_result(budget);
  out.push_back(std::move(budget));
  return out;
}

}  // namespace bifree

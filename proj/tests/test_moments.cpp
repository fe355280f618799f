#include <gtest/gtest.h>

#include <random>

#include "bifree/errors.hpp"
#include "bifree/fock.hpp"
#include "bifree/moments.hpp"
#include "models.hpp"

using namespace bifree;

namespace {

const Tolerance tight{1e-10};

BElement scalar(cplx c) {
  BElement b(1, 1);
  b(0, 0) = c;
  return b;
}

std::shared_ptr<FockModel> standard_semicircular() { return make_bisemicircular({CPMap::identity(1)}, {}); }

std::vector<Monomial> repeat(const std::string& name, int n) { return std::vector<Monomial>(n, Monomial{Factor::sym(name)}); }

PartitionTable pair_cumulants(const ChiWord& chi) {
  PartitionTable t;
  for (const auto& p : enumerate_bnc(chi)) {
    bool pairs = true;
    for (const auto& b : p.blocks()) pairs &= b.size() == 2;
    t.push_back({p, scalar(pairs ? 1.0 : 0.0)});
  }
  return t;
}

}  // namespace

TEST(EvalFull, Examples) {
  auto s = standard_semicircular();
  EXPECT_TRUE(tight.equal(eval_moment_full(*s, {}), identity(1)));
  EXPECT_TRUE(tight.equal(eval_moment_full(*s, parse_word("S1 S1")), scalar(1.0)));
  std::mt19937_64 rng(3);
  auto f = make_bisemicircular({random_cp_map(rng, 2)}, {random_cp_map(rng, 2)});
  auto b1 = random_belement(rng, 2), b2 = random_belement(rng, 2);
  EXPECT_TRUE(tight.equal(eval_moment_full(*f, {Factor::lb(b1), Factor::rb(b2)}), b1 * b2));
  EXPECT_THROW(eval_moment_full(*f, parse_word("S1 Q")), InputError);
  EXPECT_THROW(eval_moment_full(*f, {Factor::lb(identity(3))}), InputError);
}

TEST(EvalFull, BCompatibility) {
  std::mt19937_64 rng(8);
  auto f = testmodel::shifted_pair(rng, 2);
  for (int trial = 0; trial < 30; ++trial) {
    Monomial w;
    const int n = 1 + trial % 5;
    for (int k = 0; k < n; ++k) w.push_back(Factor::sym(rng() % 2 ? "A" : "B"));
    auto b1 = random_belement(rng, 2), b2 = random_belement(rng, 2);
    Monomial wrapped{Factor::lb(b1), Factor::rb(b2)};
    wrapped.insert(wrapped.end(), w.begin(), w.end());
    ASSERT_TRUE(Tolerance{1e-9}.equal(eval_moment_full(*f, wrapped), b1 * eval_moment_full(*f, w) * b2));
  }
}

TEST(EvalPi, FullAndScalarProduct) {
  std::mt19937_64 rng(4);
  auto f = testmodel::shifted_pair(rng, 1);
  auto chi = ChiWord::parse("lll");
  auto ops = repeat("A", 3);
  EXPECT_TRUE(tight.equal(eval_moment_pi(*f, BncPartition::one(chi), ops), eval_moment_full(*f, parse_word("A A A"))));
  BncPartition p(chi, {{1, 2}, {3}});
  EXPECT_TRUE(tight.equal(eval_moment_pi(*f, p, ops),
                          eval_moment_full(*f, parse_word("A A")) * eval_moment_full(*f, parse_word("A"))));
  EXPECT_THROW(eval_moment_pi(*f, p, {Monomial{Factor::sym("B")}, ops[1], ops[2]}), InputError);
}

TEST(EvalPi, TwelvePointReductionTrace) {
  auto chi = ChiWord::parse("lrrrlrrllrll");
  BncPartition pi(chi, {{1, 3}, {2}, {4, 5, 11, 12}, {6, 10}, {7}, {8, 9}});
  std::mt19937_64 rng(12);
  auto f = testmodel::shifted_pair(rng, 1);
  std::vector<Monomial> ops;
  for (int k = 1; k <= 12; ++k) ops.push_back({Factor::sym(chi.at(k) == Side::Left ? "A" : "B")});
  std::string trace;
  eval_moment_pi(*f, pi, ops, {}, &trace);
  EXPECT_EQ(trace, "E(Z1 L[E(Z4 Z5 L[E(Z8 Z9)] Z11 Z12 L[E(Z6 R[E(Z7)] Z10)])] Z3)·E(Z2)");
}

TEST(EvalPi, TwelvePointMatchesNestedForm) {
  auto chi = ChiWord::parse("lrrrlrrllrll");
  BncPartition pi(chi, {{1, 3}, {2}, {4, 5, 11, 12}, {6, 10}, {7}, {8, 9}});
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 5; ++trial) {
    auto f = testmodel::shifted_pair(rng, 2);
    std::vector<Monomial> z;
    for (int k = 1; k <= 12; ++k) z.push_back(testmodel::random_operand(rng, chi.at(k), 2));
    auto E = [&](std::initializer_list<Monomial> parts) {
      Monomial w;
      for (const auto& p : parts) w = concat(w, p);
      return eval_moment_full(*f, w);
    };
    auto L = [](const BElement& b) { return Monomial{Factor::lb(b)}; };
    auto R = [](const BElement& b) { return Monomial{Factor::rb(b)}; };
    // E(Z2 E(Z1 Z3 E(Z4 R_{E(Z6 R_{E(Z7)} Z10)} Z5 L_{E(Z8 Z9)} Z11 Z12)))
    const BElement e7 = E({z[6]});
    const BElement e6 = E({z[5], R(e7), z[9]});
    const BElement e8 = E({z[7], z[8]});
    const BElement e4 = E({z[3], R(e6), z[4], L(e8), z[10], z[11]});
    const BElement e1 = E({z[0], z[2], L(e4)});
    const BElement expect = E({z[1], L(e1)});
    for (auto strategy : {ReductionStrategy::Predecessor, ReductionStrategy::Successor, ReductionStrategy::Random}) {
      ReductionOptions opts{strategy, static_cast<std::uint64_t>(trial)};
      ASSERT_LE(max_abs(eval_moment_pi(*f, pi, z, opts) - expect), 1e-10 * std::max(1.0, max_abs(expect))) << trial;
    }
    ASSERT_GT(max_abs(expect), 1e-3);
  }
}

TEST(EvalPi, OrderIndependenceRandomized) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 120; ++trial) {
    const int n = 2 + trial % 7;
    const int d = 1 + trial % 2;
    auto f = testmodel::shifted_pair(rng, d);
    auto chi = testmodel::random_chi(rng, n);
    const auto all = enumerate_bnc(chi);
    const auto& pi = all[rng() % all.size()];
    std::vector<Monomial> z;
    for (int k = 1; k <= n; ++k) z.push_back(testmodel::random_operand(rng, chi.at(k), d));
    const BElement ref = eval_moment_pi(*f, pi, z);
    const BElement succ = eval_moment_pi(*f, pi, z, {ReductionStrategy::Successor});
    ASSERT_LE(max_abs(ref - succ), 1e-10 * std::max(1.0, max_abs(ref))) << chi.str() << " " << pi.str();
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const BElement r = eval_moment_pi(*f, pi, z, {ReductionStrategy::Random, seed});
      ASSERT_LE(max_abs(ref - r), 1e-10 * std::max(1.0, max_abs(ref))) << chi.str() << " " << pi.str();
    }
  }
}

TEST(Cumulants, Semicircular) {
  auto s = standard_semicircular();
  auto c1 = ChiWord::parse("l");
  EXPECT_TRUE(tight.equal(cumulant_pi(*s, BncPartition::one(c1), repeat("S1", 1)), scalar(0.0)));
  auto c2 = ChiWord::parse("ll");
  EXPECT_TRUE(tight.equal(cumulant_pi(*s, BncPartition::one(c2), repeat("S1", 2)), scalar(1.0)));
  for (int n = 3; n <= 6; ++n) {
    auto c = ChiWord::uniform(n, Side::Left);
    EXPECT_TRUE(tight.equal(cumulant_pi(*s, BncPartition::one(c), repeat("S1", n)), scalar(0.0))) << n;
  }
}

TEST(Cumulants, SingletonIsExpectation) {
  std::mt19937_64 rng(1);
  auto f = testmodel::shifted_pair(rng, 2);
  auto c = ChiWord::parse("r");
  EXPECT_TRUE(tight.equal(cumulant_pi(*f, BncPartition::one(c), {{Factor::sym("B")}}),
                          eval_moment_full(*f, parse_word("B"))));
}

TEST(Cumulants, OperatorValuedPairIsCovariance) {
  std::mt19937_64 rng(6);
  CPMap flip(2, {matrix_unit(2, 1, 2), matrix_unit(2, 2, 1)});
  auto etaR = random_cp_map(rng, 2);
  auto f = make_bisemicircular({flip}, {etaR});
  for (int trial = 0; trial < 10; ++trial) {
    auto b = random_belement(rng, 2);
    auto ll = ChiWord::parse("ll");
    EXPECT_TRUE(Tolerance{1e-9}.equal(
        cumulant_pi(*f, BncPartition::one(ll), {{Factor::sym("S1"), Factor::lb(b)}, {Factor::sym("S1")}}),
        flip.apply(b)));
    auto rr = ChiWord::parse("rr");
    EXPECT_TRUE(Tolerance{1e-9}.equal(
        cumulant_pi(*f, BncPartition::one(rr), {{Factor::sym("D1"), Factor::rb(b)}, {Factor::sym("D1")}}),
        etaR.apply(b)));
    auto lr = ChiWord::parse("lr");
    EXPECT_LE(max_abs(cumulant_pi(*f, BncPartition::one(lr), {{Factor::sym("S1"), Factor::lb(b)}, {Factor::sym("D1")}})),
              1e-12);
    auto rl = ChiWord::parse("rl");
    EXPECT_LE(max_abs(cumulant_pi(*f, BncPartition::one(rl), {{Factor::sym("D1"), Factor::rb(b)}, {Factor::sym("S1")}})),
              1e-12);
  }
}

TEST(Cumulants, CoefficientAbsorption) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + trial % 4;
    auto f = testmodel::shifted_pair(rng, 2);
    auto chi = testmodel::random_chi(rng, n);
    std::vector<Monomial> z;
    for (int k = 1; k <= n; ++k) z.push_back(testmodel::random_operand(rng, chi.at(k), 2));
    const int slot = static_cast<int>(rng() % (n - 1));
    const auto b = random_belement(rng, 2);
    z[slot] = chi.at(slot + 1) == Side::Left ? Monomial{Factor::lb(b)} : Monomial{Factor::rb(b)};
    ASSERT_LE(max_abs(cumulant_pi(*f, BncPartition::one(chi), z)), 1e-9) << chi.str() << " slot " << slot;
  }
}

TEST(MobiusInversion, SemicircularMoments) {
  for (int n : {4, 6}) {
    for (const char* w : {"l", "r"}) {
      std::string s;
      for (int k = 0; k < n; ++k) s += (k % 2 && *w == 'r') ? 'r' : 'l';
      auto chi = ChiWord::parse(s);
      auto v = moments_from_cumulants(pair_cumulants(chi), BncPartition::one(chi));
      EXPECT_NEAR(v(0, 0).real(), n == 4 ? 2.0 : 5.0, 1e-12);
    }
  }
}

TEST(MobiusInversion, FirstCumulantOnly) {
  auto chi = ChiWord::parse("lrlrl");
  PartitionTable t;
  const cplx c(0.5, 0.25);
  for (const auto& p : enumerate_bnc(chi)) t.push_back({p, scalar(p.block_count() == 5 ? std::pow(c, 5) : 0.0)});
  auto v = moments_from_cumulants(t, BncPartition::one(chi));
  EXPECT_NEAR(std::abs(v(0, 0) - std::pow(c, 5)), 0.0, 1e-14);
}

TEST(MobiusInversion, RoundTripOnRandomTables) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 6;
    const int d = 1 + trial % 2;
    auto chi = testmodel::random_chi(rng, n);
    PartitionTable moments;
    for (const auto& p : enumerate_bnc(chi)) moments.push_back({p, random_belement(rng, d)});
    auto back = moments_from_cumulants(cumulants_from_moments(moments));
    ASSERT_EQ(back.size(), moments.size());
    for (std::size_t k = 0; k < back.size(); ++k) {
      ASSERT_EQ(back[k].partition, moments[k].partition);
      ASSERT_TRUE(tight.equal(back[k].value, moments[k].value));
    }
  }
}

TEST(MobiusInversion, IncompleteTableIsAnError) {
  auto chi = ChiWord::parse("llll");
  auto t = pair_cumulants(chi);
  t.erase(t.begin() + 3);
  EXPECT_THROW(moments_from_cumulants(t, BncPartition::one(chi)), InputError);
}

TEST(MobiusInversion, MomentTableMatchesDirectCumulants) {
  std::mt19937_64 rng(5);
  auto f = testmodel::shifted_pair(rng, 2);
  auto chi = ChiWord::parse("lrrl");
  std::vector<Monomial> z;
  for (int k = 1; k <= 4; ++k) z.push_back(testmodel::random_operand(rng, chi.at(k), 2));
  auto kappas = cumulants_from_moments(moment_table(*f, chi, z));
  for (const auto& e : kappas) ASSERT_TRUE(Tolerance{1e-9}.equal(e.value, cumulant_pi(*f, e.partition, z)));
}

TEST(HatEmbedding, Examples) {
  auto chi = ChiWord::parse("lrl");
  BncPartition p(chi, {{1, 3}, {2}});
  EXPECT_EQ(hat_embed(p, {1, 1, 1}, chi), p);
  auto chi_hat = ChiWord::parse("llrrlr");
  EXPECT_EQ(grouped_chi(chi_hat, {2, 2, 2}).str(), "lrr");
  auto g = grouped_chi(chi_hat, {2, 2, 2});
  EXPECT_EQ(hat_embed(BncPartition::one(g), {2, 2, 2}, chi_hat), BncPartition::one(chi_hat));
  auto ll = ChiWord::parse("ll");
  EXPECT_EQ(hat_embed(BncPartition::zero(ll), {2, 2}, ChiWord::parse("llll")).blocks(), (Blocks{{1, 2}, {3, 4}}));
  EXPECT_THROW(grouped_chi(ChiWord::parse("lrll"), {2, 2}), InputError);
}

TEST(HatEmbedding, PreservesOrderAndMobius) {
  auto chi_hat = ChiWord::parse("llrrlr");
  const std::vector<int> sizes{2, 2, 2};
  auto chi = grouped_chi(chi_hat, sizes);
  const auto all = enumerate_bnc(chi);
  for (const auto& a : all)
    for (const auto& b : all) {
      auto ah = hat_embed(a, sizes, chi_hat), bh = hat_embed(b, sizes, chi_hat);
      ASSERT_EQ(lattice_leq(a, b), lattice_leq(ah, bh));
      ASSERT_EQ(mobius_bnc(a, b), mobius_bnc(ah, bh));
    }
}

TEST(ProductExpansion, GroupedSemicircularSquares) {
  auto s = standard_semicircular();
  auto r = product_cumulant_expand(*s, ChiWord::parse("llll"), {2, 2}, repeat("S1", 4));
  EXPECT_NEAR(r.grouped(0, 0).real(), 1.0, 1e-12);
  EXPECT_NEAR(r.expanded(0, 0).real(), 1.0, 1e-12);
}

TEST(ProductExpansion, TrivialGrouping) {
  std::mt19937_64 rng(14);
  auto f = testmodel::shifted_pair(rng, 2);
  auto chi = ChiWord::parse("lrl");
  std::vector<Monomial> z;
  for (int k = 1; k <= 3; ++k) z.push_back(testmodel::random_operand(rng, chi.at(k), 2));
  auto r = product_cumulant_expand(*f, chi, {1, 1, 1}, z);
  EXPECT_EQ(r.terms, 1);
  EXPECT_TRUE(Tolerance{1e-10}.equal(r.grouped, cumulant_pi(*f, BncPartition::one(chi), z)));
  EXPECT_LE(r.residual, 1e-10);
}

TEST(ProductExpansion, RandomOperatorValuedInstances) {
  std::mt19937_64 rng(15);
  const std::vector<std::pair<const char*, std::vector<int>>> cases{
      {"llr", {2, 1}}, {"rrl", {2, 1}}, {"llrrl", {2, 2, 1}}, {"lrrl", {1, 2, 1}}, {"rrllr", {2, 3}}};
  for (const auto& [w, sizes] : cases) {
    auto chi_hat = ChiWord::parse(w);
    for (int trial = 0; trial < 4; ++trial) {
      auto f = testmodel::shifted_pair(rng, 2);
      std::vector<Monomial> z;
      for (int k = 1; k <= chi_hat.size(); ++k) z.push_back(testmodel::random_operand(rng, chi_hat.at(k), 2));
      auto r = product_cumulant_expand(*f, chi_hat, sizes, z);
      ASSERT_LE(r.residual, 1e-9) << w;
      ASSERT_GT(r.terms, 1);
    }
  }
}

TEST(BifreeTest, SingleFamilyIsVacuous) {
  auto r = bifree_test(*standard_semicircular(), 4);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.tested, 0u);
}

TEST(BifreeTest, FockPairsPass) {
  std::mt19937_64 rng(2);
  auto f = make_bisemicircular({random_cp_map(rng, 2)}, {random_cp_map(rng, 2)});
  auto r = bifree_test(*f, 4);
  EXPECT_TRUE(r.pass);
  EXPECT_GT(r.tested, 0u);
  EXPECT_LE(r.max_residual, 1e-9);
}

TEST(BifreeTest, SharedIndexFails) {
  std::map<std::pair<int, int>, CPMap> cov;
  cov.emplace(std::make_pair(1, 1), CPMap::identity(1).scaled(0.7));
  std::vector<FockModel::Entry> entries{{{"X", Side::Left, false, "x", ""}, left_semicircular(1)},
                                        {{"Y", Side::Left, false, "y", ""}, left_semicircular(1)}};
  FockModel f(FockSpace(1, cov), entries);
  auto r = bifree_test(f, 2);
  EXPECT_FALSE(r.pass);
  EXPECT_NEAR(r.max_by_order.at(2), 0.7, 1e-12);
}

TEST(Polynomials, ProductAndAdjoint) {
  auto f = make_circular_pair();
  auto c = Polynomial::sym("c_l");
  auto p = cplx(0.0, 2.0) * c * Polynomial::sym("c_r");
  auto a = p.adjoint(*f);
  ASSERT_EQ(a.terms().size(), 1u);
  EXPECT_EQ(a.terms()[0].coef, cplx(0.0, -2.0));
  EXPECT_EQ(to_string(a.terms()[0].word), "c_r* c_l*");
  EXPECT_NEAR(std::abs(tau(*f, Polynomial::sym("c_l*") * c) - 1.0), 0.0, 1e-12);
}

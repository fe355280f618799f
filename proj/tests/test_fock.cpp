#include <gtest/gtest.h>

#include <random>

#include "bifree/errors.hpp"
#include "bifree/fock.hpp"
#include "bifree/moments.hpp"
#include "bifree/verify.hpp"
#include "oracles.hpp"

using namespace bifree;

namespace {

const Tolerance tol{1e-10};

FockVector apply_op(const FockSpace& space, const FockOperator& op, const FockVector& v) {
  FockVector out;
  out.d = v.d;
  for (const auto& t : op) out += space.apply(t.word, v) * t.coef;
  return out;
}

FockSpace two_index_space(std::mt19937_64& rng, int d) {
  std::map<std::pair<int, int>, CPMap> cov;
  cov.emplace(std::make_pair(1, 1), random_cp_map(rng, d));
  cov.emplace(std::make_pair(2, 2), random_cp_map(rng, d));
  return FockSpace(d, cov);
}

// b0 Z_i b1 Z_j b2 built from creations and coefficient multiplications.
FockVector random_vector(const FockSpace& s, std::mt19937_64& rng, int depth, bool right) {
  const int d = s.dim();
  FockVector v = FockVector::from_b(random_belement(rng, d));
  for (int k = 0; k < depth; ++k) {
    const int idx = 1 + static_cast<int>(rng() % 2);
    v = s.apply(right ? FockFactor::r(idx) : FockFactor::l(idx), v);
    v = s.apply(right ? FockFactor::Rb(random_belement(rng, d)) : FockFactor::Lb(random_belement(rng, d)), v);
  }
  return v;
}

BElement scalar(cplx c) {
  BElement b(1, 1);
  b(0, 0) = c;
  return b;
}

}  // namespace

TEST(FockAction, CreationOnVacuum) {
  FockSpace s(2, {{{1, 1}, CPMap::identity(2)}});
  auto v = s.apply(FockFactor::l(1), FockVector::vacuum(2));
  ASSERT_EQ(v.terms.size(), 1u);
  const auto& [idx, t] = *v.terms.begin();
  EXPECT_EQ(idx, std::vector<int>{1});
  // 1_B (x) 1_B = sum_ij E_ii (x) E_jj
  std::vector<cplx> expect(16, 0.0);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) expect[(i * 2 + i) * 4 + j * 2 + j] = 1.0;
  EXPECT_EQ(t, expect);
  EXPECT_EQ(v.depth(), 1);
}

TEST(FockAction, AnnihilationOnDepthZeroVanishes) {
  FockSpace s(2, {{{1, 1}, CPMap::identity(2)}});
  EXPECT_LE(s.apply(FockFactor::lstar(1), FockVector::vacuum(2)).max_abs(), 0.0);
  EXPECT_LE(s.apply(FockFactor::rstar(1), FockVector::vacuum(2)).max_abs(), 0.0);
}

TEST(FockAction, AnnihilationAppliesCovariance) {
  std::mt19937_64 rng(1);
  auto eta = random_cp_map(rng, 2);
  FockSpace s(2, {{{1, 1}, eta}});
  for (int trial = 0; trial < 10; ++trial) {
    auto b0 = random_belement(rng, 2), b1 = random_belement(rng, 2);
    // b0 Z_1 b1
    auto v = s.apply(FockFactor::Lb(b0), s.apply(FockFactor::l(1), FockVector::from_b(b1)));
    EXPECT_TRUE(tol.equal(s.project(s.apply(FockFactor::lstar(1), v)), eta.apply(b0) * b1));
    // the right annihilator reads the last coefficient
    auto w = s.apply(FockFactor::Rb(b1), s.apply(FockFactor::r(1), FockVector::from_b(b0)));
    EXPECT_TRUE(tol.equal(s.project(s.apply(FockFactor::rstar(1), w)), b0 * eta.apply(b1)));
  }
}

TEST(FockAction, UnknownIndexAndDimension) {
  FockSpace s(2, {{{1, 1}, CPMap::identity(2)}});
  auto v = s.apply(FockFactor::l(1), FockVector::vacuum(2));
  EXPECT_LE(s.apply(FockFactor::lstar(3), v).max_abs(), 0.0);
  EXPECT_THROW(s.apply(FockFactor::Lb(identity(3)), v), InputError);
  EXPECT_THROW(FockSpace(2, {{{1, 1}, CPMap::identity(3)}}), InputError);
  EXPECT_THROW(make_bisemicircular({CPMap::identity(2)}, {CPMap::identity(1)}), InputError);
}

TEST(FockExpectation, Semicircular) {
  auto f = make_bisemicircular({CPMap::identity(1)}, {});
  EXPECT_NEAR(max_abs(f->eval(parse_word("S1"))), 0.0, 1e-15);
  std::string w;
  for (int k = 1; k <= 4; ++k) {
    w += "S1 S1 ";
    EXPECT_NEAR(f->eval(parse_word(w))(0, 0).real(), static_cast<double>(oracle::catalan(k)), 1e-12) << k;
  }
}

TEST(FockExpectation, ExactnessInTruncation) {
  std::mt19937_64 rng(4);
  auto eta = random_cp_map(rng, 2);
  FockOperatorWord w{FockFactor::lstar(1), FockFactor::Lb(random_belement(rng, 2)), FockFactor::lstar(1),
                     FockFactor::l(1), FockFactor::Lb(random_belement(rng, 2)), FockFactor::l(1)};
  FockSpace exact(2, {{{1, 1}, eta}}, 2, false);
  FockSpace deep(2, {{{1, 1}, eta}}, 12, false);
  EXPECT_TRUE(tol.equal(exact.expectation(w), deep.expectation(w)));
  FockSpace shallow(2, {{{1, 1}, eta}}, 1, false);
  EXPECT_THROW(shallow.expectation(w), ComputationError);
  FockSpace grows(2, {{{1, 1}, eta}}, 1, true);
  EXPECT_TRUE(tol.equal(grows.expectation(w), deep.expectation(w)));
}

TEST(FockInner, CreationAndAnnihilationAreAdjoint) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 1 + trial % 2;
    auto s = two_index_space(rng, d);
    // The pairing contracts from the left, so r and r* are adjoint for it only when B is scalar.
    const bool right = d == 1 && trial % 4 == 0;
    for (int depth = 0; depth <= 2; ++depth) {
      auto v = random_vector(s, rng, depth, right);
      auto w = random_vector(s, rng, depth + 1, right);
      for (int k = 1; k <= 2; ++k) {
        auto create = right ? FockFactor::r(k) : FockFactor::l(k);
        auto annihilate = right ? FockFactor::rstar(k) : FockFactor::lstar(k);
        auto lhs = s.inner(s.apply(create, v), w);
        auto rhs = s.inner(v, s.apply(annihilate, w));
        ASSERT_TRUE(Tolerance{1e-9}.equal(lhs, rhs)) << trial << " d=" << d << " right=" << right << " depth=" << depth;
      }
    }
  }
}

TEST(FockInner, PositiveOnRandomVectors) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    auto s = two_index_space(rng, 2);
    auto v = random_vector(s, rng, 2, false);
    v += random_vector(s, rng, 2, true);
    BElement g = s.inner(v, v);
    ASSERT_TRUE(tol.equal(g, g.adjoint()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g);
    ASSERT_GE(es.eigenvalues().minCoeff(), -1e-9);
  }
}

TEST(FockCommutation, LeftAndRightSemicircularsCommute) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    auto s = two_index_space(rng, 2);
    auto S = left_semicircular(1), D = right_semicircular(2);
    std::vector<FockVector> inputs{FockVector::vacuum(2), random_vector(s, rng, 2, false), random_vector(s, rng, 2, true)};
    for (const auto& v : inputs) {
      auto sd = apply_op(s, S, apply_op(s, D, v));
      auto ds = apply_op(s, D, apply_op(s, S, v));
      ASSERT_LE((sd - ds).max_abs(), 1e-10);
    }
  }
}

TEST(FockModelMoments, AgreeWithPairCumulantTable) {
  // Scalar covariances; every cumulant except same-symbol pairs vanishes.
  const std::map<std::string, double> var{{"S1", 1.5}, {"S2", 0.5}, {"D1", 2.0}};
  auto f = make_bisemicircular({CPMap::identity(1).scaled(1.5), CPMap::identity(1).scaled(0.5)},
                               {CPMap::identity(1).scaled(2.0)});
  std::mt19937_64 rng(3);
  const std::vector<std::string> names{"S1", "S2", "D1"};
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + trial % 6;
    std::vector<std::string> w;
    std::vector<Side> sides;
    Monomial word;
    for (int k = 0; k < n; ++k) {
      w.push_back(names[rng() % 3]);
      sides.push_back(w.back()[0] == 'S' ? Side::Left : Side::Right);
      word.push_back(Factor::sym(w.back()));
    }
    ChiWord chi(sides);
    PartitionTable t;
    for (const auto& p : enumerate_bnc(chi)) {
      double v = 1.0;
      for (const auto& b : p.blocks())
        v *= b.size() == 2 && w[b[0] - 1] == w[b[1] - 1] ? var.at(w[b[0] - 1]) : 0.0;
      t.push_back({p, scalar(v)});
    }
    const auto expect = moments_from_cumulants(t, BncPartition::one(chi));
    ASSERT_NEAR(std::abs(f->eval(word)(0, 0) - expect(0, 0)), 0.0, 1e-9) << to_string(word);
  }
}

TEST(CircularPair, Moments) {
  auto f = make_circular_pair();
  auto phi = [&](const char* w) { return f->eval(parse_word(w))(0, 0); };
  EXPECT_NEAR(std::abs(phi("c_l* c_l") - 1.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(phi("c_l c_l")), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(phi("c_l c_l* c_l c_l*") - 2.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(phi("c_l c_l c_l* c_l*") - 1.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(phi("c_r* c_r") - 1.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(phi("c_l c_r")), 0.0, 1e-12);
}

TEST(CircularPair, SecondCumulants) {
  auto f = make_circular_pair();
  auto k2 = [&](const char* a, const char* b, const char* chi) {
    return cumulant_pi(*f, BncPartition::one(ChiWord::parse(chi)), {{Factor::sym(a)}, {Factor::sym(b)}})(0, 0);
  };
  EXPECT_NEAR(std::abs(k2("c_l", "c_l", "ll")), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(k2("c_l*", "c_l*", "ll")), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(k2("c_l", "c_l*", "ll") - 1.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(k2("c_l", "c_r*", "lr")), 0.0, 1e-12);
}

TEST(CircularPair, PerturbationAddsVariance) {
  auto f = make_circular_pair(0.5);
  EXPECT_NEAR(f->eval(parse_word("c_l* c_l"))(0, 0).real(), 1.5, 1e-12);
  EXPECT_NEAR(f->eval(parse_word("c_r c_r*"))(0, 0).real(), 1.5, 1e-12);
  EXPECT_THROW(make_circular_pair(-1.0), InputError);
}

#include <gtest/gtest.h>

#include <random>

#include "bifree/errors.hpp"
#include "bifree/opalgebra.hpp"
#include "bifree/verify.hpp"

using namespace bifree;

namespace {

bool psd(const Eigen::MatrixXcd& m, double eps = 1e-9) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
  return es.eigenvalues().minCoeff() >= -eps;
}

// Flip map written directly on entries.
BElement flip_direct(const BElement& a) {
  BElement out = BElement::Zero(2, 2);
  out(0, 0) = a(1, 1);
  out(1, 1) = a(0, 0);
  return out;
}

}  // namespace

TEST(BElement, MatrixUnitsAreOneBased) {
  auto e = matrix_unit(3, 1, 3);
  EXPECT_EQ(e(0, 2), cplx(1.0));
  EXPECT_DOUBLE_EQ(e.cwiseAbs().sum(), 1.0);
  EXPECT_THROW(matrix_unit(2, 0, 1), InputError);
}

TEST(BElement, TraceAndDiag) {
  BElement b(2, 2);
  b << 1.0, 2.0, 3.0, 5.0;
  EXPECT_NEAR(std::abs(trace_d(b) - cplx(3.0)), 0.0, 1e-15);
  BElement d = diag_expectation(b);
  EXPECT_EQ(d(0, 1), cplx(0.0));
  EXPECT_EQ(d(1, 1), cplx(5.0));
  EXPECT_DOUBLE_EQ(max_abs(b), 5.0);
}

TEST(CPMap, KrausExamples) {
  // V = E11: b -> E11 b E11
  CPMap e11(2, {matrix_unit(2, 1, 1)});
  BElement b(2, 2);
  b << 1.0, 2.0, 3.0, 4.0;
  BElement expect = BElement::Zero(2, 2);
  expect(0, 0) = 1.0;
  EXPECT_TRUE(Tolerance{}.equal(apply_cp(e11, b), expect));
  EXPECT_TRUE(Tolerance{}.equal(CPMap::identity(3).apply(matrix_unit(3, 2, 3)), matrix_unit(3, 2, 3)));
}

TEST(CPMap, ChoiOfKnownMaps) {
  for (int d = 1; d <= 3; ++d) {
    EXPECT_TRUE(CPMap::identity(d).choi_psd());
    std::vector<BElement> kraus;
    for (int i = 1; i <= d; ++i) kraus.push_back(matrix_unit(d, i, i));
    CPMap diag(d, kraus);
    EXPECT_TRUE(diag.choi_psd());
    std::mt19937_64 rng(d);
    auto b = random_belement(rng, d);
    EXPECT_TRUE(Tolerance{}.equal(diag.apply(b), diag_expectation(b)));
  }
}

TEST(CPMap, FromChoiRoundTrip) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    auto eta = random_cp_map(rng, 2, 3);
    auto back = CPMap::from_choi(2, eta.choi());
    for (int i = 1; i <= 2; ++i)
      for (int j = 1; j <= 2; ++j)
        ASSERT_TRUE(Tolerance{1e-10}.equal(eta.apply(matrix_unit(2, i, j)), back.apply(matrix_unit(2, i, j))));
  }
  // Transpose map has a non-PSD Choi matrix.
  Eigen::MatrixXcd swap = Eigen::MatrixXcd::Zero(4, 4);
  swap(0, 0) = swap(3, 3) = swap(1, 2) = swap(2, 1) = 1.0;
  EXPECT_THROW(CPMap::from_choi(2, swap), InputError);
}

TEST(CPMap, FlipMatchesDirectForm) {
  std::mt19937_64 rng(5);
  // diag(a22, a11) via Kraus E12, E21
  CPMap flip(2, {matrix_unit(2, 1, 2), matrix_unit(2, 2, 1)});
  EXPECT_TRUE(flip.choi_psd());
  for (int trial = 0; trial < 50; ++trial) {
    auto b = random_belement(rng, 2);
    ASSERT_TRUE(Tolerance{}.equal(flip.apply(b), flip_direct(b)));
  }
}

TEST(CPMap, PreservesPositivity) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + trial % 3;
    auto eta = random_cp_map(rng, d, 2);
    ASSERT_TRUE(eta.choi_psd());
    auto a = random_belement(rng, d);
    BElement pos = a * a.adjoint();
    ASSERT_TRUE(psd(eta.apply(pos)));
    // Complete positivity: the ampliation to M_2(B) stays positive.
    Eigen::MatrixXcd big = Eigen::MatrixXcd::Random(2 * d, 2 * d);
    Eigen::MatrixXcd P = big * big.adjoint();
    Eigen::MatrixXcd out(2 * d, 2 * d);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) out.block(i * d, j * d, d, d) = eta.apply(P.block(i * d, j * d, d, d));
    ASSERT_TRUE(psd(out, 1e-8));
  }
}

TEST(CPMap, ScaledRejectsNegative) {
  EXPECT_THROW(CPMap::identity(2).scaled(-1.0), InputError);
  auto half = CPMap::identity(2).scaled(0.25);
  EXPECT_TRUE(Tolerance{}.equal(half.apply(identity(2)), 0.25 * identity(2)));
}

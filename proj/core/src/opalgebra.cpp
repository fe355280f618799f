#include "bifree/opalgebra.hpp"

#include <cmath>

#include "bifree/errors.hpp"

namespace bifree {

BElement identity(int d) { return BElement::Identity(d, d); }
BElement zero(int d) { return BElement::Zero(d, d); }

BElement matrix_unit(int d, int i, int j) {
  if (i < 1 || i > d || j < 1 || j > d) throw InputError("matrix unit index out of range");
  BElement e = BElement::Zero(d, d);
  e(i - 1, j - 1) = 1.0;
  return e;
}

cplx trace_d(const BElement& b) { return b.trace() / static_cast<double>(b.rows()); }

BElement diag_expectation(const BElement& b) {
  BElement out = BElement::Zero(b.rows(), b.cols());
  out.diagonal() = b.diagonal();
  return out;
}

double max_abs(const BElement& b) { return b.size() == 0 ? 0.0 : b.cwiseAbs().maxCoeff(); }

bool Tolerance::equal(const BElement& a, const BElement& b) const {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return max_abs(a - b) <= abs_eps;
}

CPMap::CPMap(int d, std::vector<BElement> kraus) : d_(d), kraus_(std::move(kraus)) {
  if (d < 1) throw InputError("CPMap dimension must be >= 1");
  if (kraus_.empty()) throw InputError("CPMap needs at least one Kraus operator");
  for (const auto& v : kraus_)
    if (v.rows() != d || v.cols() != d) throw InputError("Kraus operator has wrong dimension");
}

CPMap CPMap::identity(int d) { return CPMap(d, {BElement::Identity(d, d)}); }

CPMap CPMap::from_choi(int d, const Eigen::MatrixXcd& choi, double eps) {
  if (choi.rows() != d * d || choi.cols() != d * d) throw InputError("Choi matrix must be d^2 x d^2");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (choi + choi.adjoint()));
  std::vector<BElement> kraus;
  for (int k = 0; k < d * d; ++k) {
    const double lambda = es.eigenvalues()(k);
    if (lambda < -eps) throw InputError("Choi matrix is not positive semidefinite");
    if (lambda <= eps) continue;
    // choi = sum_{ij} E_ij (x) eta(E_ij); eigenvector v gives V with V(r, i) = v(i*d + r)
    const Eigen::VectorXcd v = es.eigenvectors().col(k) * std::sqrt(lambda);
    BElement V(d, d);
    for (int i = 0; i < d; ++i)
      for (int r = 0; r < d; ++r) V(r, i) = v(i * d + r);
    kraus.push_back(V);
  }
  if (kraus.empty()) kraus.push_back(BElement::Zero(d, d));
  return CPMap(d, std::move(kraus));
}

BElement CPMap::apply(const BElement& b) const {
  if (b.rows() != d_ || b.cols() != d_) throw InputError("apply_cp: dimension mismatch");
  BElement out = BElement::Zero(d_, d_);
  for (const auto& v : kraus_) out.noalias() += v * b * v.adjoint();
  return out;
}

Eigen::MatrixXcd CPMap::choi() const {
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(d_ * d_, d_ * d_);
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j) c.block(i * d_, j * d_, d_, d_) = apply(matrix_unit(d_, i + 1, j + 1));
  return c;
}

bool CPMap::choi_psd(double eps) const {
  const Eigen::MatrixXcd c = choi();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (c + c.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -eps;
}

CPMap CPMap::scaled(double c) const {
  if (c < 0) throw InputError("CPMap::scaled needs a nonnegative factor");
  std::vector<BElement> k = kraus_;
  for (auto& v : k) v *= std::sqrt(c);
  return CPMap(d_, std::move(k));
}

BElement apply_cp(const CPMap& eta, const BElement& b) { return eta.apply(b); }

}  // namespace bifree

#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace bifree {

using cplx = std::complex<double>;
// An element of B = M_d(C).
using BElement = Eigen::MatrixXcd;

BElement identity(int d);
BElement zero(int d);
// Matrix unit E_{ij}, 1-based.
BElement matrix_unit(int d, int i, int j);

cplx trace_d(const BElement& b);  // normalized trace
BElement diag_expectation(const BElement& b);
double max_abs(const BElement& b);

struct Tolerance {
  double abs_eps = 1e-9;
  bool equal(const BElement& a, const BElement& b) const;
};

// Completely positive map b -> sum_i V_i b V_i^* stored in Kraus form.
class CPMap {
 public:
  CPMap() = default;
  CPMap(int d, std::vector<BElement> kraus);

  static CPMap identity(int d);
  // Drops eigenvalues of the Choi matrix below eps; throws if one is below -eps.
  static CPMap from_choi(int d, const Eigen::MatrixXcd& choi, double eps = 1e-9);

  int dim() const { return d_; }
  const std::vector<BElement>& kraus() const { return kraus_; }

  BElement apply(const BElement& b) const;
  // Choi matrix sum_{ij} E_ij (x) eta(E_ij), size d^2.
  Eigen::MatrixXcd choi() const;
  bool choi_psd(double eps = 1e-9) const;
  CPMap scaled(double c) const;  // c >= 0

 private:
  int d_ = 0;
  std::vector<BElement> kraus_;
};

BElement apply_cp(const CPMap& eta, const BElement& b);

}  // namespace bifree

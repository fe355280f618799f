#pragma once

#include <memory>
#include <string>
#include <vector>

#include "bifree/moments.hpp"

namespace bifree {

// A lifted generator sum_{ij} z_ij (x) E_ij acting on the side of `symbol`.
struct LiftedSymbol {
  GeneratorSymbol symbol;
  std::vector<std::vector<Polynomial>> entries;  // d x d, empty polynomial = 0
};

// E_d(Z_1...Z_n) = sum over index tuples of phi(z_{1;i1j1} ... z_{n;injn})
// times the matrix units multiplied in chi-order. The base must be scalar.
class MatrixLift : public MomentFunctional {
 public:
  MatrixLift(std::shared_ptr<const MomentFunctional> base, int d, std::vector<LiftedSymbol> symbols);

  int dim() const override { return d_; }
  const std::vector<GeneratorSymbol>& symbols() const override { return symbols_; }
  std::string backing() const override { return "matrix-lift"; }
  BElement eval(const Monomial& word) const override;

  const MomentFunctional& base() const { return *base_; }

 private:
  struct Entry {
    int i, j;
    Polynomial z;
  };

  std::shared_ptr<const MomentFunctional> base_;
  CachedFunctional cached_;
  int d_;
  std::vector<GeneratorSymbol> symbols_;
  std::map<std::string, std::vector<Entry>> entries_;
};

// X = x (x) E12 + x* (x) E21 on the left, Y likewise with y on the right, d = 2.
// Each base name is scaled by `scale`.
std::shared_ptr<MatrixLift> make_xy_lift(std::shared_ptr<const MomentFunctional> base, const std::string& x,
                                         const std::string& x_star, const std::string& y, const std::string& y_star,
                                         double scale = 1.0);

// Scalar functional tr_d o E. 1x1 Lb/Rb factors act as scalars.
class TracedFunctional : public MomentFunctional {
 public:
  explicit TracedFunctional(std::shared_ptr<const MomentFunctional> inner) : inner_(std::move(inner)) {}
  int dim() const override { return 1; }
  const std::vector<GeneratorSymbol>& symbols() const override { return inner_->symbols(); }
  std::string backing() const override { return inner_->backing(); }
  BElement eval(const Monomial& word) const override;

 private:
  std::shared_ptr<const MomentFunctional> inner_;
};

// tau_2 of a word in X (left) and Y (right) from the alternating p/q words in the base:
// 0 for odd length, otherwise (phi(p-word) + phi(q-word)) / 2.
cplx lift_parity_moment(const MomentFunctional& base, const ChiWord& chi, const std::string& x,
                        const std::string& x_star, const std::string& y, const std::string& y_star);

struct AafReport {
  int max_n = 0;
  std::size_t words = 0;
  double max_discrepancy = 0.0;
  std::string worst_chi;
  bool pass = true;
};

// Alternating adjoint flipping: phi(z^{p}) = phi(z^{q}) for every even-length chi.
AafReport aaf_check(const MomentFunctional& base, const std::string& x, const std::string& x_star,
                    const std::string& y, const std::string& y_star, int max_n, double eps = 1e-9);

}  // namespace bifree

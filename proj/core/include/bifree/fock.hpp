#pragma once

#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "bifree/moments.hpp"
#include "bifree/opalgebra.hpp"

namespace bifree {

// Finite sum of words b_0 Z_{k_1} b_1 ... Z_{k_m} b_m. Each index sequence carries a
// dense tensor over B^{(x)(m+1)}: slot s holds matrix unit E_{ij} at offset i*d+j,
// slot 0 most significant.
struct FockVector {
  int d = 1;
  std::map<std::vector<int>, std::vector<cplx>> terms;

  static FockVector vacuum(int d);  // 1_B at depth 0
  static FockVector from_b(const BElement& b);

  int depth() const;
  double max_abs() const;
  FockVector& operator+=(const FockVector& other);
  FockVector& operator*=(cplx c);
  friend FockVector operator-(FockVector a, const FockVector& b) { return a += (b * cplx(-1.0)); }
  friend FockVector operator*(FockVector v, cplx c) { return v *= c; }
};

struct FockFactor {
  enum class Kind : std::uint8_t { LeftCreate, LeftAnnihilate, RightCreate, RightAnnihilate, LeftMul, RightMul };
  Kind kind;
  int index = 0;
  BElement coef;

  static FockFactor l(int k) { return {Kind::LeftCreate, k, {}}; }
  static FockFactor lstar(int k) { return {Kind::LeftAnnihilate, k, {}}; }
  static FockFactor r(int k) { return {Kind::RightCreate, k, {}}; }
  static FockFactor rstar(int k) { return {Kind::RightAnnihilate, k, {}}; }
  static FockFactor Lb(BElement b) { return {Kind::LeftMul, 0, std::move(b)}; }
  static FockFactor Rb(BElement b) { return {Kind::RightMul, 0, std::move(b)}; }
};

using FockOperatorWord = std::vector<FockFactor>;

struct FockOperatorTerm {
  cplx coef;
  FockOperatorWord word;
};
using FockOperator = std::vector<FockOperatorTerm>;

FockOperator left_semicircular(int k, cplx scale = 1.0);   // scale (l_k + l*_k)
FockOperator right_semicircular(int k, cplx scale = 1.0);  // scale (r_k + r*_k)
FockOperator operator+(FockOperator a, const FockOperator& b);
FockOperator operator*(cplx c, FockOperator a);

// Full Fock space F(B, K) with covariance table eta_{i,j}. Missing entries are zero maps.
class FockSpace {
 public:
  FockSpace(int d, std::map<std::pair<int, int>, CPMap> covariance, int truncation = 8, bool auto_extend = true);

  int dim() const { return d_; }
  int truncation() const { return truncation_; }
  bool auto_extend() const { return auto_extend_; }
  const CPMap* eta(int i, int j) const;

  FockVector apply(const FockFactor& f, const FockVector& v) const;
  // Rightmost factor acts first.
  FockVector apply(const FockOperatorWord& w, const FockVector& v) const;
  BElement project(const FockVector& v) const;  // p: depth-0 component
  BElement expectation(const FockOperatorWord& w) const;

  // B-valued pairing <v, w> = w^* v through iterated eta; l_k and l*_k are adjoint for it.
  BElement inner(const FockVector& v, const FockVector& w) const;

 private:
  FockVector apply_impl(const FockFactor& f, const FockVector& v, int limit) const;
  const std::vector<BElement>& eta_units(int i, int j) const;

  int d_;
  std::map<std::pair<int, int>, CPMap> cov_;
  std::map<std::pair<int, int>, std::vector<BElement>> units_;  // eta(E_ab) for each pair
  int truncation_;
  bool auto_extend_;
};

// MomentFunctional whose symbols are polynomials in the Fock primitives.
class FockModel : public MomentFunctional {
 public:
  struct Entry {
    GeneratorSymbol symbol;
    FockOperator op;
  };

  FockModel(FockSpace space, std::vector<Entry> entries);

  int dim() const override { return space_.dim(); }
  const std::vector<GeneratorSymbol>& symbols() const override { return symbols_; }
  std::string backing() const override { return "fock-model"; }
  BElement eval(const Monomial& word) const override;

  const FockSpace& space() const { return space_; }
  const FockOperator& op(const std::string& name) const;
  // Applies the word to v; components that cannot return to depth 0 are kept.
  FockVector apply(const Monomial& word, const FockVector& v) const;

 private:
  FockVector apply_factor(const Factor& f, const FockVector& v, int limit) const;

  FockSpace space_;
  std::vector<GeneratorSymbol> symbols_;
  std::map<std::string, FockOperator> ops_;
  std::map<std::string, int> lowering_;  // max annihilations per symbol
};

// S_i = l_i + l*_i for i = 1..p with covariance eta_left[i-1]; D_j = r_{p+j} + r*_{p+j}.
std::shared_ptr<FockModel> make_bisemicircular(const std::vector<CPMap>& eta_left,
                                               const std::vector<CPMap>& eta_right);

// c_l = (s_1 + i s_2)/sqrt2 and c_r = (d_1 + i d_2)/sqrt2 over scalar B, with symbols
// "c_l", "c_l*", "c_r", "c_r*". For t > 0 each is perturbed by sqrt(t) times an
// independent circular element of the same side.
std::shared_ptr<FockModel> make_circular_pair(double t = 0.0);

}  // namespace bifree

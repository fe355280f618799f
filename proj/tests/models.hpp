#pragma once

#include <memory>
#include <random>

#include "bifree/fock.hpp"
#include "bifree/verify.hpp"

namespace testmodel {

using namespace bifree;

// Left A = l1 + l1* + L_a and right B = r2 + r2* + R_b over M_d with random covariances,
// so that singletons have nonzero expectation.
inline std::shared_ptr<FockModel> shifted_pair(std::mt19937_64& rng, int d) {
  std::map<std::pair<int, int>, CPMap> cov;
  cov.emplace(std::make_pair(1, 1), random_cp_map(rng, d));
  cov.emplace(std::make_pair(2, 2), random_cp_map(rng, d));
  FockOperator a = left_semicircular(1);
  a.push_back({1.0, {FockFactor::Lb(random_belement(rng, d))}});
  FockOperator b = right_semicircular(2);
  b.push_back({1.0, {FockFactor::Rb(random_belement(rng, d))}});
  std::vector<FockModel::Entry> entries{{{"A", Side::Left, false, "A", ""}, a}, {{"B", Side::Right, false, "B", ""}, b}};
  return std::make_shared<FockModel>(FockSpace(d, std::move(cov)), std::move(entries));
}

// Operand of the given side: the side's symbol, sometimes with a coefficient next to it.
inline Monomial random_operand(std::mt19937_64& rng, Side side, int d) {
  const std::string name = side == Side::Left ? "A" : "B";
  switch (rng() % 3) {
    case 0: return {Factor::sym(name)};
    case 1:
      return side == Side::Left ? Monomial{Factor::sym(name), Factor::lb(random_belement(rng, d))}
                                : Monomial{Factor::rb(random_belement(rng, d)), Factor::sym(name)};
    default:
      return side == Side::Left ? Monomial{Factor::lb(random_belement(rng, d)), Factor::sym(name)}
                                : Monomial{Factor::sym(name), Factor::rb(random_belement(rng, d))};
  }
}

inline ChiWord random_chi(std::mt19937_64& rng, int n) {
  std::vector<Side> s;
  for (int k = 0; k < n; ++k) s.push_back(rng() % 2 ? Side::Right : Side::Left);
  return ChiWord(s);
}

}  // namespace testmodel

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bifree/bnc.hpp"
#include "bifree/opalgebra.hpp"

namespace bifree {

struct GeneratorSymbol {
  std::string name;
  Side side = Side::Left;
  bool adjoint = false;
  std::string family;
  // Name of the adjoint symbol; empty when the symbol is self-adjoint.
  std::string partner;
};

struct Factor {
  enum class Kind : std::uint8_t { Symbol, Lb, Rb };
  Kind kind = Kind::Symbol;
  std::string name;
  BElement coef;

  static Factor sym(std::string name);
  static Factor lb(BElement b);
  static Factor rb(BElement b);
};

using Monomial = std::vector<Factor>;

Monomial concat(const Monomial& a, const Monomial& b);
// Whitespace separated symbol names, e.g. "S1 S1 D1 D1".
Monomial parse_word(std::string_view text);
std::string to_string(const Monomial& word);
// Exact key (coefficient bits included) for memo tables.
std::string word_key(const Monomial& word);

struct Term {
  cplx coef;
  Monomial word;
};

class MomentFunctional;

// Finite linear combination of monomials.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(Monomial word, cplx coef = 1.0);
  static Polynomial sym(const std::string& name) { return Polynomial(Monomial{Factor::sym(name)}); }
  static Polynomial one() { return Polynomial(Monomial{}); }

  const std::vector<Term>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  Polynomial& operator+=(const Polynomial& other);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a += (-1.0) * b; }
  friend Polynomial operator*(cplx c, Polynomial p);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

  // Reversed words, conjugated coefficients, symbols replaced by partners.
  Polynomial adjoint(const MomentFunctional& f) const;

 private:
  std::vector<Term> terms_;
};

// B-valued expectation on words in tagged generators.
class MomentFunctional {
 public:
  virtual ~MomentFunctional() = default;

  virtual int dim() const = 0;
  virtual const std::vector<GeneratorSymbol>& symbols() const = 0;
  virtual std::string backing() const = 0;
  // E of the product of the factors in order; input already validated.
  virtual BElement eval(const Monomial& word) const = 0;

  const GeneratorSymbol* find(std::string_view name) const;
  const GeneratorSymbol& symbol(std::string_view name) const;  // throws InputError
  Side side_of(const Factor& f) const;
};

// Memoizing wrapper; safe for concurrent queries.
class CachedFunctional : public MomentFunctional {
 public:
  explicit CachedFunctional(const MomentFunctional& inner) : inner_(inner) {}
  int dim() const override { return inner_.dim(); }
  const std::vector<GeneratorSymbol>& symbols() const override { return inner_.symbols(); }
  std::string backing() const override { return inner_.backing(); }
  BElement eval(const Monomial& word) const override;
  std::size_t cache_size() const;

 private:
  const MomentFunctional& inner_;
  mutable std::shared_mutex mu_;
  mutable std::unordered_map<std::string, BElement> cache_;
};

// Explicit table of moments keyed by symbol words, with an optional rule for
// words not in the table (default: zero). Lb/Rb factors only for d = 1.
class TableFunctional : public MomentFunctional {
 public:
  using Rule = std::function<BElement(const std::vector<std::string>&)>;

  TableFunctional(int d, std::vector<GeneratorSymbol> symbols, Rule fallback = nullptr);
  void set(const std::string& word, BElement value);
  int dim() const override { return d_; }
  const std::vector<GeneratorSymbol>& symbols() const override { return symbols_; }
  std::string backing() const override { return "explicit-table"; }
  BElement eval(const Monomial& word) const override;

 private:
  int d_;
  std::vector<GeneratorSymbol> symbols_;
  std::map<std::string, BElement> table_;
  Rule fallback_;
};

BElement eval_moment_full(const MomentFunctional& f, const Monomial& word);
BElement eval_polynomial(const MomentFunctional& f, const Polynomial& p);
cplx tau(const MomentFunctional& f, const Polynomial& p);

enum class ReductionStrategy : std::uint8_t { Predecessor, Successor, Random };

struct ReductionOptions {
  ReductionStrategy strategy = ReductionStrategy::Predecessor;
  std::uint64_t seed = 0;
  // Allows the last operand to mix sides (grouped products in the hat embedding).
  bool allow_mixed_last = false;
};

// Bi-multiplicative E_pi by recursive stripping of chi-intervals.
// If trace is non-null it receives the nested expression, e.g. "E(Z1 L[E(Z2)])·E(Z3)".
BElement eval_moment_pi(const MomentFunctional& f, const BncPartition& pi, const std::vector<Monomial>& operands,
                        const ReductionOptions& opts = {}, std::string* trace = nullptr);

BElement cumulant_pi(const MomentFunctional& f, const BncPartition& pi, const std::vector<Monomial>& operands,
                     const ReductionOptions& opts = {});

struct TableEntry {
  BncPartition partition;
  BElement value;
};
// Values indexed by partitions of one chi-word.
using PartitionTable = std::vector<TableEntry>;

PartitionTable moment_table(const MomentFunctional& f, const ChiWord& chi, const std::vector<Monomial>& operands,
                            const ReductionOptions& opts = {});
// kappa_pi = sum_{sigma <= pi} E_sigma mu(sigma, pi)
PartitionTable cumulants_from_moments(const PartitionTable& moments);
// E_sigma = sum_{pi <= sigma} kappa_pi
PartitionTable moments_from_cumulants(const PartitionTable& cumulants);
// Single entry; throws InputError when the table misses part of [0, pi].
BElement moments_from_cumulants(const PartitionTable& cumulants, const BncPartition& pi);

// chi_hat must be constant on every group except the last; the grouped word
// has the side of each group's last element.
ChiWord grouped_chi(const ChiWord& chi_hat, const std::vector<int>& group_sizes);
BncPartition hat_embed(const BncPartition& pi, const std::vector<int>& group_sizes, const ChiWord& chi_hat);

struct ProductExpansion {
  BElement grouped;
  BElement expanded;
  double residual = 0.0;
  int terms = 0;
};

ProductExpansion product_cumulant_expand(const MomentFunctional& f, const ChiWord& chi_hat,
                                         const std::vector<int>& group_sizes, const std::vector<Monomial>& operands);

struct BifreeEntry {
  std::string word;
  std::string chi;
  double size = 0.0;  // max absolute entry
};

struct BifreeReport {
  int max_order = 0;
  std::size_t tested = 0;
  double max_residual = 0.0;
  std::vector<double> max_by_order;  // index = order
  std::vector<BifreeEntry> entries;  // only the ones above tolerance, plus the worst
  bool pass = true;
};

// Every mixed cumulant kappa_{1_chi}(Z_1,...,Z_n), n <= max_order, over words in the
// functional's symbols whose family assignment is not constant.
BifreeReport bifree_test(const MomentFunctional& f, int max_order, double eps = 1e-9);

}  // namespace bifree

#include "bifree/moments.hpp"

#include <algorithm>
#include <cstring>
#include <random>
#include <sstream>

#include "bifree/errors.hpp"

namespace bifree {

Factor Factor::sym(std::string name) {
  Factor f;
  f.kind = Kind::Symbol;
  f.name = std::move(name);
  return f;
}

Factor Factor::lb(BElement b) {
  Factor f;
  f.kind = Kind::Lb;
  f.coef = std::move(b);
  return f;
}

Factor Factor::rb(BElement b) {
  Factor f;
  f.kind = Kind::Rb;
  f.coef = std::move(b);
  return f;
}

Monomial concat(const Monomial& a, const Monomial& b) {
  Monomial out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

Monomial parse_word(std::string_view text) {
  Monomial out;
  std::istringstream is{std::string(text)};
  std::string tok;
  while (is >> tok) out.push_back(Factor::sym(tok));
  return out;
}

namespace {

std::string format_b(const BElement& b) {
  std::ostringstream os;
  os << '[';
  for (int i = 0; i < b.rows(); ++i) {
    if (i) os << ';';
    for (int j = 0; j < b.cols(); ++j) {
      if (j) os << ',';
      os << b(i, j).real();
      if (b(i, j).imag() != 0.0) os << (b(i, j).imag() > 0 ? "+" : "") << b(i, j).imag() << 'i';
    }
  }
  os << ']';
  return os.str();
}

}  // namespace

std::string to_string(const Monomial& word) {
  std::string out;
  for (const auto& f : word) {
    if (!out.empty()) out += ' ';
    switch (f.kind) {
      case Factor::Kind::Symbol: out += f.name; break;
      case Factor::Kind::Lb: out += "L" + format_b(f.coef); break;
      case Factor::Kind::Rb: out += "R" + format_b(f.coef); break;
    }
  }
  return out;
}

std::string word_key(const Monomial& word) {
  std::string key;
  for (const auto& f : word) {
    switch (f.kind) {
      case Factor::Kind::Symbol:
        key += 'S';
        key += f.name;
        key += '\x1f';
        break;
      case Factor::Kind::Lb:
      case Factor::Kind::Rb: {
        key += f.kind == Factor::Kind::Lb ? 'L' : 'R';
        key += static_cast<char>(f.coef.rows());
        const auto bytes = static_cast<std::size_t>(f.coef.size()) * sizeof(cplx);
        const auto* p = reinterpret_cast<const char*>(f.coef.data());
        key.append(p, bytes);
        break;
      }
    }
  }
  return key;
}

Polynomial::Polynomial(Monomial word, cplx coef) { terms_.push_back({coef, std::move(word)}); }

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  return *this;
}

Polynomial operator*(cplx c, Polynomial p) {
  for (auto& t : p.terms_) t.coef *= c;
  return p;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial out;
  out.terms_.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& x : a.terms_)
    for (const auto& y : b.terms_) out.terms_.push_back({x.coef * y.coef, concat(x.word, y.word)});
  return out;
}

Polynomial Polynomial::adjoint(const MomentFunctional& f) const {
  Polynomial out;
  for (const auto& t : terms_) {
    Monomial w;
    for (auto it = t.word.rbegin(); it != t.word.rend(); ++it) {
      Factor g = *it;
      if (g.kind == Factor::Kind::Symbol) {
        const auto& s = f.symbol(g.name);
        if (!s.partner.empty()) g.name = s.partner;
      } else {
        g.coef = g.coef.adjoint().eval();
      }
      w.push_back(std::move(g));
    }
    out.terms_.push_back({std::conj(t.coef), std::move(w)});
  }
  return out;
}

const GeneratorSymbol* MomentFunctional::find(std::string_view name) const {
  for (const auto& s : symbols())
    if (s.name == name) return &s;
  return nullptr;
}

const GeneratorSymbol& MomentFunctional::symbol(std::string_view name) const {
  const auto* s = find(name);
  if (!s) throw InputError("unknown symbol '" + std::string(name) + "'");
  return *s;
}

Side MomentFunctional::side_of(const Factor& f) const {
  switch (f.kind) {
    case Factor::Kind::Lb: return Side::Left;
    case Factor::Kind::Rb: return Side::Right;
    default: return symbol(f.name).side;
  }
}

BElement CachedFunctional::eval(const Monomial& word) const {
  const std::string key = word_key(word);
  {
    std::shared_lock lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  BElement v = inner_.eval(word);
  std::unique_lock lock(mu_);
  cache_.emplace(key, v);
  return v;
}

std::size_t CachedFunctional::cache_size() const {
  std::shared_lock lock(mu_);
  return cache_.size();
}

TableFunctional::TableFunctional(int d, std::vector<GeneratorSymbol> symbols, Rule fallback)
    : d_(d), symbols_(std::move(symbols)), fallback_(std::move(fallback)) {
  if (d < 1) throw InputError("table functional dimension must be >= 1");
}

void TableFunctional::set(const std::string& word, BElement value) {
  if (value.rows() != d_ || value.cols() != d_) throw InputError("table value has wrong dimension");
  Monomial w = parse_word(word);
  std::string key;
  for (const auto& f : w) {
    symbol(f.name);
    key += f.name + ' ';
  }
  table_[key] = std::move(value);
}

BElement TableFunctional::eval(const Monomial& word) const {
  cplx scalar = 1.0;
  std::vector<std::string> names;
  std::string key;
  for (const auto& f : word) {
    if (f.kind == Factor::Kind::Symbol) {
      names.push_back(f.name);
      key += f.name + ' ';
    } else {
      if (d_ != 1) throw InputError("table functional accepts Lb/Rb factors only for d = 1");
      scalar *= f.coef(0, 0);
    }
  }
  if (names.empty()) return scalar * identity(d_);
  auto it = table_.find(key);
  if (it != table_.end()) return scalar * it->second;
  if (fallback_) return scalar * fallback_(names);
  return zero(d_);
}

BElement eval_moment_full(const MomentFunctional& f, const Monomial& word) {
  const int d = f.dim();
  for (const auto& x : word) {
    if (x.kind == Factor::Kind::Symbol) {
      f.symbol(x.name);
    } else if (x.coef.rows() != d || x.coef.cols() != d) {
      throw InputError("coefficient dimension does not match the functional (d=" + std::to_string(d) + ")");
    }
  }
  if (word.empty()) return identity(d);
  return f.eval(word);
}

BElement eval_polynomial(const MomentFunctional& f, const Polynomial& p) {
  BElement acc = zero(f.dim());
  for (const auto& t : p.terms()) acc += t.coef * eval_moment_full(f, t.word);
  return acc;
}

cplx tau(const MomentFunctional& f, const Polynomial& p) { return trace_d(eval_polynomial(f, p)); }

namespace {

struct Slot {
  Monomial word;
  std::string label;
};

class Reducer {
 public:
  Reducer(const MomentFunctional& f, const BncPartition& pi, std::vector<Slot> slots, const ReductionOptions& opts,
          bool want_trace)
      : f_(f), pi_(pi), slots_(std::move(slots)), opts_(opts), rng_(opts.seed), want_trace_(want_trace) {}

  BElement run(std::string& trace) {
    std::vector<int> all(pi_.size());
    for (int i = 0; i < pi_.size(); ++i) all[i] = i + 1;
    return reduce(all, trace);
  }

 private:
  int rank(int i) const { return pi_.chi().s_inverse()[i - 1]; }

  BElement reduce(std::vector<int> positions, std::string& trace) {
    std::vector<int> order = positions;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return rank(a) < rank(b); });
    const int m = static_cast<int>(order.size());

    std::map<int, std::pair<int, int>> span;  // block -> (first, last) index into order
    std::map<int, int> count;
    for (int k = 0; k < m; ++k) {
      const int b = pi_.block_of(order[k]);
      auto it = span.find(b);
      if (it == span.end()) span[b] = {k, k};
      else it->second.second = k;
      ++count[b];
    }

    if (span.size() == 1) {
      Monomial word;
      for (int p : positions) word.insert(word.end(), slots_[p - 1].word.begin(), slots_[p - 1].word.end());
      if (want_trace_) {
        trace = "E(";
        for (std::size_t k = 0; k < positions.size(); ++k) trace += (k ? " " : "") + slots_[positions[k] - 1].label;
        trace += ")";
      }
      return word.empty() ? identity(f_.dim()) : f_.eval(word);
    }

    const int outer = pi_.block_of(order.front());
    if (outer != pi_.block_of(order.back())) {
      // Product over maximal chi-intervals that are unions of blocks, in chi-order.
      BElement value = identity(f_.dim());
      int start = 0, reach = -1;
      bool first = true;
      for (int k = 0; k < m; ++k) {
        reach = std::max(reach, span[pi_.block_of(order[k])].second);
        if (k != reach) continue;
        std::vector<int> piece(order.begin() + start, order.begin() + k + 1);
        std::sort(piece.begin(), piece.end());
        std::string sub;
        value = value * reduce(piece, sub);
        if (want_trace_) {
          trace += (first ? "" : "·") + sub;
        }
        first = false;
        start = k + 1;
      }
      return value;
    }

    std::vector<int> candidates;
    for (const auto& [b, s] : span)
      if (b != outer && s.second - s.first + 1 == count[b]) candidates.push_back(b);
    if (candidates.empty()) throw ComputationError("eval_moment_pi: no reducible chi-interval (not bi-non-crossing?)");
    std::sort(candidates.begin(), candidates.end(), [&](int a, int b) { return span[a].first < span[b].first; });

    int chosen = candidates.front();
    bool use_predecessor = opts_.strategy != ReductionStrategy::Successor;
    if (opts_.strategy == ReductionStrategy::Random) {
      chosen = candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng_)];
      use_predecessor = std::uniform_int_distribution<int>(0, 1)(rng_) == 0;
    }

    std::vector<int> inner, rest;
    for (int p : positions) (pi_.block_of(p) == chosen ? inner : rest).push_back(p);
    std::string sub;
    const BElement b = reduce(inner, sub);

    const auto [lo, hi] = span[chosen];
    const int target = use_predecessor ? order[lo - 1] : order[hi + 1];
    Slot& slot = slots_[target - 1];
    const bool left = pi_.chi().at(target) == Side::Left;
    if (use_predecessor == left) {
      // Z_p L_b (predecessor, left) or Z_q R_b (successor, right): append.
      slot.word.push_back(left ? Factor::lb(b) : Factor::rb(b));
      if (want_trace_) slot.label += std::string(left ? " L[" : " R[") + sub + "]";
    } else {
      slot.word.insert(slot.word.begin(), left ? Factor::lb(b) : Factor::rb(b));
      if (want_trace_) slot.label = std::string(left ? "L[" : "R[") + sub + "] " + slot.label;
    }
    return reduce(rest, trace);
  }

  const MomentFunctional& f_;
  const BncPartition& pi_;
  std::vector<Slot> slots_;
  const ReductionOptions& opts_;
  std::mt19937_64 rng_;
  bool want_trace_;
};

void check_operands(const MomentFunctional& f, const ChiWord& chi, const std::vector<Monomial>& operands,
                    bool allow_mixed_last) {
  if (static_cast<int>(operands.size()) != chi.size())
    throw InputError("operand count " + std::to_string(operands.size()) + " does not match chi length " +
                     std::to_string(chi.size()));
  const int d = f.dim();
  for (int k = 1; k <= chi.size(); ++k) {
    for (const auto& x : operands[k - 1]) {
      if (x.kind != Factor::Kind::Symbol && (x.coef.rows() != d || x.coef.cols() != d))
        throw InputError("coefficient dimension does not match the functional");
      const Side s = f.side_of(x);
      if (s != chi.at(k) && !(allow_mixed_last && k == chi.size()))
        throw InputError("operand " + std::to_string(k) + " (" + to_string(operands[k - 1]) +
                         ") does not have side " + side_char(chi.at(k)));
    }
  }
}

}  // namespace

BElement eval_moment_pi(const MomentFunctional& f, const BncPartition& pi, const std::vector<Monomial>& operands,
                        const ReductionOptions& opts, std::string* trace) {
  check_operands(f, pi.chi(), operands, opts.allow_mixed_last);
  std::vector<Slot> slots;
  for (int k = 0; k < pi.size(); ++k) slots.push_back({operands[k], "Z" + std::to_string(k + 1)});
  Reducer r(f, pi, std::move(slots), opts, trace != nullptr);
  std::string t;
  BElement v = r.run(t);
  if (trace) *trace = std::move(t);
  return v;
}

BElement cumulant_pi(const MomentFunctional& f, const BncPartition& pi, const std::vector<Monomial>& operands,
                     const ReductionOptions& opts) {
  check_operands(f, pi.chi(), operands, opts.allow_mixed_last);
  BElement acc = zero(f.dim());
  for (const auto& sigma : enumerate_bnc(pi.chi())) {
    if (!lattice_leq(sigma, pi)) continue;
    const auto mu = mobius_bnc(sigma, pi);
    if (mu == 0) continue;
    acc += static_cast<double>(mu) * eval_moment_pi(f, sigma, operands, opts);
  }
  return acc;
}

PartitionTable moment_table(const MomentFunctional& f, const ChiWord& chi, const std::vector<Monomial>& operands,
                            const ReductionOptions& opts) {
  PartitionTable out;
  for (auto& sigma : enumerate_bnc(chi)) {
    BElement v = eval_moment_pi(f, sigma, operands, opts);
    out.push_back({std::move(sigma), std::move(v)});
  }
  return out;
}

PartitionTable cumulants_from_moments(const PartitionTable& moments) {
  PartitionTable out;
  for (const auto& target : moments) {
    BElement acc = BElement::Zero(target.value.rows(), target.value.cols());
    for (const auto& e : moments) {
      if (!lattice_leq(e.partition, target.partition)) continue;
      acc += static_cast<double>(mobius_bnc(e.partition, target.partition)) * e.value;
    }
    out.push_back({target.partition, std::move(acc)});
  }
  return out;
}

BElement moments_from_cumulants(const PartitionTable& cumulants, const BncPartition& pi) {
  if (cumulants.empty()) throw InputError("empty cumulant table");
  BElement acc = BElement::Zero(cumulants.front().value.rows(), cumulants.front().value.cols());
  std::size_t found = 0;
  for (const auto& e : cumulants) {
    if (!(e.partition.chi() == pi.chi()) || !lattice_leq(e.partition, pi)) continue;
    acc += e.value;
    ++found;
  }
  std::size_t needed = 0;
  for (const auto& sigma : enumerate_bnc(pi.chi()))
    if (lattice_leq(sigma, pi)) ++needed;
  if (found != needed)
    throw InputError("cumulant table incomplete on [0, " + pi.str() + "]: " + std::to_string(found) + " of " +
                     std::to_string(needed) + " entries");
  return acc;
}

PartitionTable moments_from_cumulants(const PartitionTable& cumulants) {
  PartitionTable out;
  for (const auto& e : cumulants) out.push_back({e.partition, moments_from_cumulants(cumulants, e.partition)});
  return out;
}

ChiWord grouped_chi(const ChiWord& chi_hat, const std::vector<int>& group_sizes) {
  int total = 0;
  for (int k : group_sizes) {
    if (k < 1) throw InputError("group sizes must be positive");
    total += k;
  }
  if (total != chi_hat.size()) throw InputError("group sizes do not sum to the length of chi_hat");
  std::vector<Side> labels;
  int pos = 0;
  for (std::size_t g = 0; g < group_sizes.size(); ++g) {
    const Side s = chi_hat.at(pos + group_sizes[g]);
    if (g + 1 < group_sizes.size())
      for (int i = pos + 1; i <= pos + group_sizes[g]; ++i)
        if (chi_hat.at(i) != s) throw InputError("chi_hat is not constant on group " + std::to_string(g + 1));
    labels.push_back(s);
    pos += group_sizes[g];
  }
  return ChiWord(std::move(labels));
}

BncPartition hat_embed(const BncPartition& pi, const std::vector<int>& group_sizes, const ChiWord& chi_hat) {
  const ChiWord chi = grouped_chi(chi_hat, group_sizes);
  if (!(chi == pi.chi())) throw InputError("partition chi-word does not match the grouping of chi_hat");
  std::vector<int> start(group_sizes.size() + 1, 0);
  for (std::size_t g = 0; g < group_sizes.size(); ++g) start[g + 1] = start[g] + group_sizes[g];
  Blocks out;
  for (const auto& b : pi.blocks()) {
    std::vector<int> nb;
    for (int p : b)
      for (int i = start[p - 1] + 1; i <= start[p]; ++i) nb.push_back(i);
    out.push_back(std::move(nb));
  }
  return BncPartition(chi_hat, std::move(out));
}

ProductExpansion product_cumulant_expand(const MomentFunctional& f, const ChiWord& chi_hat,
                                         const std::vector<int>& group_sizes, const std::vector<Monomial>& operands) {
  const ChiWord chi = grouped_chi(chi_hat, group_sizes);
  if (static_cast<int>(operands.size()) != chi_hat.size()) throw InputError("operand count does not match chi_hat");
  ReductionOptions opts;
  opts.allow_mixed_last = true;

  std::vector<Monomial> grouped;
  int pos = 0;
  for (int k : group_sizes) {
    Monomial w;
    for (int i = 0; i < k; ++i) w = concat(w, operands[pos + i]);
    grouped.push_back(std::move(w));
    pos += k;
  }
  CachedFunctional cached(f);
  ProductExpansion out;
  out.grouped = cumulant_pi(cached, BncPartition::one(chi), grouped, opts);

  const BncPartition zero_hat = hat_embed(BncPartition::zero(chi), group_sizes, chi_hat);
  const BncPartition one_hat = BncPartition::one(chi_hat);
  const PartitionTable kappa = cumulants_from_moments(moment_table(cached, chi_hat, operands, opts));
  out.expanded = zero(f.dim());
  for (const auto& e : kappa) {
    if (!(lattice_join(e.partition, zero_hat) == one_hat)) continue;
    out.expanded += e.value;
    ++out.terms;
  }
  out.residual = max_abs(out.grouped - out.expanded);
  return out;
}

BifreeReport bifree_test(const MomentFunctional& f, int max_order, double eps) {
  if (max_order < 1 || max_order > 8) throw InputError("bifree_test: max_order must be in 1..8");
  const auto& syms = f.symbols();
  for (const auto& s : syms)
    if (s.family.empty()) throw InputError("symbol '" + s.name + "' is not assigned to a family");

  CachedFunctional cached(f);
  BifreeReport report;
  report.max_order = max_order;
  report.max_by_order.assign(max_order + 1, 0.0);
  BifreeEntry worst;
  const int g = static_cast<int>(syms.size());
  for (int n = 2; n <= max_order; ++n) {
    std::vector<int> idx(n, 0);
    while (true) {
      bool mixed = false;
      for (int k = 1; k < n; ++k) mixed |= syms[idx[k]].family != syms[idx[0]].family;
      if (mixed) {
        std::vector<Side> sides;
        std::vector<Monomial> ops;
        Monomial word;
        for (int k : idx) {
          sides.push_back(syms[k].side);
          ops.push_back({Factor::sym(syms[k].name)});
          word.push_back(Factor::sym(syms[k].name));
        }
        const ChiWord chi(sides);
        const double size = max_abs(cumulant_pi(cached, BncPartition::one(chi), ops));
        ++report.tested;
        report.max_by_order[n] = std::max(report.max_by_order[n], size);
        BifreeEntry e{to_string(word), chi.str(), size};
        if (size > eps) report.entries.push_back(e);
        if (size >= report.max_residual) {
          if (size > report.max_residual || worst.word.empty()) worst = e;
          report.max_residual = size;
        }
      }
      int k = n - 1;
      while (k >= 0 && ++idx[k] == g) idx[k--] = 0;
      if (k < 0) break;
    }
  }
  report.pass = report.max_residual <= eps;
  if (report.pass && !worst.word.empty()) report.entries.push_back(worst);
  return report;
}

}  // namespace bifree

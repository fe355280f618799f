#include "bifree/matrix_lift.hpp"

#include <functional>

#include "bifree/errors.hpp"

namespace bifree {

MatrixLift::MatrixLift(std::shared_ptr<const MomentFunctional> base, int d, std::vector<LiftedSymbol> symbols)
    : base_(std::move(base)), cached_(*base_), d_(d) {
  if (base_->dim() != 1) throw InputError("matrix lift needs a scalar base functional");
  if (d < 1) throw InputError("matrix lift dimension must be >= 1");
  for (auto& s : symbols) {
    if (static_cast<int>(s.entries.size()) != d) throw InputError("lifted symbol needs d x d entries");
    std::vector<Entry> list;
    for (int i = 0; i < d; ++i) {
      if (static_cast<int>(s.entries[i].size()) != d) throw InputError("lifted symbol needs d x d entries");
      for (int j = 0; j < d; ++j) {
        if (s.entries[i][j].empty()) continue;
        for (const auto& t : s.entries[i][j].terms())
          for (const auto& f : t.word)
            if (f.kind == Factor::Kind::Symbol) base_->symbol(f.name);
        list.push_back({i, j, s.entries[i][j]});
      }
    }
    entries_[s.symbol.name] = std::move(list);
    symbols_.push_back(std::move(s.symbol));
  }
}

BElement MatrixLift::eval(const Monomial& word) const {
  const int n = static_cast<int>(word.size());
  if (n == 0) return identity(d_);
  std::vector<Side> sides;
  std::vector<std::vector<Entry>> lists(n);
  for (int k = 0; k < n; ++k) {
    const Factor& f = word[k];
    sides.push_back(side_of(f));
    if (f.kind == Factor::Kind::Symbol) {
      lists[k] = entries_.at(f.name);
    } else {
      for (int i = 0; i < d_; ++i)
        for (int j = 0; j < d_; ++j)
          if (f.coef(i, j) != 0.0) lists[k].push_back({i, j, f.coef(i, j) * Polynomial::one()});
    }
  }
  const ChiWord chi(sides);
  const auto& order = chi.s();
  BElement out = zero(d_);
  std::vector<const Entry*> chosen(n, nullptr);
  int start = 0;
  std::function<void(int, int)> rec = [&](int t, int col) {
    if (t == n) {
      Polynomial prod = Polynomial::one();
      for (int k = 0; k < n; ++k) prod = prod * chosen[k]->z;
      out(start, col) += eval_polynomial(cached_, prod)(0, 0);
      return;
    }
    const int k = order[t] - 1;
    for (const auto& e : lists[k]) {
      if (t > 0 && e.i != col) continue;
      if (t == 0) start = e.i;
      chosen[k] = &e;
      rec(t + 1, e.j);
    }
  };
  rec(0, 0);
  return out;
}

std::shared_ptr<MatrixLift> make_xy_lift(std::shared_ptr<const MomentFunctional> base, const std::string& x,
                                         const std::string& x_star, const std::string& y, const std::string& y_star,
                                         double scale) {
  if (base->symbol(x).side != Side::Left || base->symbol(x_star).side != Side::Left)
    throw InputError("x and x* must be left symbols");
  if (base->symbol(y).side != Side::Right || base->symbol(y_star).side != Side::Right)
    throw InputError("y and y* must be right symbols");
  auto off = [&](const std::string& a, const std::string& a_star) {
    std::vector<std::vector<Polynomial>> m(2, std::vector<Polynomial>(2));
    m[0][1] = scale * Polynomial::sym(a);
    m[1][0] = scale * Polynomial::sym(a_star);
    return m;
  };
  std::vector<LiftedSymbol> syms = {
      {{"X", Side::Left, false, "X", ""}, off(x, x_star)},
      {{"Y", Side::Right, false, "Y", ""}, off(y, y_star)},
  };
  return std::make_shared<MatrixLift>(std::move(base), 2, std::move(syms));
}

BElement TracedFunctional::eval(const Monomial& word) const {
  Monomial inner;
  cplx scalar = 1.0;
  for (const auto& f : word) {
    if (f.kind == Factor::Kind::Symbol) {
      inner.push_back(f);
    } else {
      if (f.coef.rows() != 1) throw InputError("traced functional accepts only scalar coefficients");
      scalar *= f.coef(0, 0);
    }
  }
  BElement out(1, 1);
  out(0, 0) = scalar * trace_d(eval_moment_full(*inner_, inner));
  return out;
}

namespace {

Monomial alternating_word(const ChiWord& chi, bool start_plain, const std::string& x, const std::string& x_star,
                          const std::string& y, const std::string& y_star) {
  const int n = chi.size();
  Monomial w(n);
  for (int t = 0; t < n; ++t) {
    const int k = chi.s()[t];
    const bool plain = (t % 2 == 0) == start_plain;
    const bool left = chi.at(k) == Side::Left;
    w[k - 1] = Factor::sym(left ? (plain ? x : x_star) : (plain ? y : y_star));
  }
  return w;
}

}  // namespace

cplx lift_parity_moment(const MomentFunctional& base, const ChiWord& chi, const std::string& x,
                        const std::string& x_star, const std::string& y, const std::string& y_star) {
  if (chi.size() % 2) return 0.0;
  const cplx p = eval_moment_full(base, alternating_word(chi, true, x, x_star, y, y_star))(0, 0);
  const cplx q = eval_moment_full(base, alternating_word(chi, false, x, x_star, y, y_star))(0, 0);
  return 0.5 * (p + q);
}

AafReport aaf_check(const MomentFunctional& base, const std::string& x, const std::string& x_star,
                    const std::string& y, const std::string& y_star, int max_n, double eps) {
  if (max_n < 2 || max_n > 8) throw InputError("aaf_check: max_n must be in 2..8");
  if (base.dim() != 1) throw InputError("aaf_check needs a scalar functional");
  AafReport r;
  r.max_n = max_n;
  for (int n = 2; n <= max_n; n += 2) {
    for (int mask = 0; mask < (1 << n); ++mask) {
      std::vector<Side> sides(n);
      for (int k = 0; k < n; ++k) sides[k] = (mask >> k) & 1 ? Side::Right : Side::Left;
      const ChiWord chi(sides);
      const cplx p = eval_moment_full(base, alternating_word(chi, true, x, x_star, y, y_star))(0, 0);
      const cplx q = eval_moment_full(base, alternating_word(chi, false, x, x_star, y, y_star))(0, 0);
      const double diff = std::abs(p - q);
      ++r.words;
      if (diff > r.max_discrepancy || r.worst_chi.empty()) {
        r.max_discrepancy = std::max(r.max_discrepancy, diff);
        r.worst_chi = chi.str();
      }
    }
  }
  r.pass = r.max_discrepancy <= eps;
  return r;
}

}  // namespace bifree

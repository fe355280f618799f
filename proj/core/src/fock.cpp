#include "bifree/fock.hpp"

#include <cmath>
#include <limits>

#include "bifree/errors.hpp"

namespace bifree {

FockVector FockVector::vacuum(int d) { return from_b(identity(d)); }

FockVector FockVector::from_b(const BElement& b) {
  FockVector v;
  v.d = static_cast<int>(b.rows());
  std::vector<cplx> t(static_cast<std::size_t>(v.d * v.d));
  for (int i = 0; i < v.d; ++i)
    for (int j = 0; j < v.d; ++j) t[i * v.d + j] = b(i, j);
  v.terms[{}] = std::move(t);
  return v;
}

int FockVector::depth() const {
  int m = 0;
  for (const auto& [idx, _] : terms) m = std::max(m, static_cast<int>(idx.size()));
  return m;
}

double FockVector::max_abs() const {
  double m = 0.0;
  for (const auto& [_, t] : terms)
    for (const auto& x : t) m = std::max(m, std::abs(x));
  return m;
}

FockVector& FockVector::operator+=(const FockVector& other) {
  for (const auto& [idx, t] : other.terms) {
    auto it = terms.find(idx);
    if (it == terms.end()) {
      terms.emplace(idx, t);
    } else {
      for (std::size_t k = 0; k < t.size(); ++k) it->second[k] += t[k];
    }
  }
  return *this;
}

FockVector& FockVector::operator*=(cplx c) {
  for (auto& [_, t] : terms)
    for (auto& x : t) x *= c;
  return *this;
}

FockOperator left_semicircular(int k, cplx scale) {
  return {{scale, {FockFactor::l(k)}}, {scale, {FockFactor::lstar(k)}}};
}

FockOperator right_semicircular(int k, cplx scale) {
  return {{scale, {FockFactor::r(k)}}, {scale, {FockFactor::rstar(k)}}};
}

FockOperator operator+(FockOperator a, const FockOperator& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

FockOperator operator*(cplx c, FockOperator a) {
  for (auto& t : a) t.coef *= c;
  return a;
}

FockSpace::FockSpace(int d, std::map<std::pair<int, int>, CPMap> covariance, int truncation, bool auto_extend)
    : d_(d), cov_(std::move(covariance)), truncation_(truncation), auto_extend_(auto_extend) {
  if (d < 1) throw InputError("Fock space dimension must be >= 1");
  for (const auto& [key, eta] : cov_) {
    if (eta.dim() != d) throw InputError("covariance map dimension does not match d");
    std::vector<BElement> u;
    for (int i = 1; i <= d; ++i)
      for (int j = 1; j <= d; ++j) u.push_back(eta.apply(matrix_unit(d, i, j)));
    units_.emplace(key, std::move(u));
  }
}

const CPMap* FockSpace::eta(int i, int j) const {
  auto it = cov_.find({i, j});
  return it == cov_.end() ? nullptr : &it->second;
}

const std::vector<BElement>& FockSpace::eta_units(int i, int j) const { return units_.at({i, j}); }

namespace {

void accumulate(FockVector& out, std::vector<int> idx, std::vector<cplx> t) {
  auto it = out.terms.find(idx);
  if (it == out.terms.end()) {
    out.terms.emplace(std::move(idx), std::move(t));
  } else {
    for (std::size_t k = 0; k < t.size(); ++k) it->second[k] += t[k];
  }
}

}  // namespace

FockVector FockSpace::apply_impl(const FockFactor& f, const FockVector& v, int limit) const {
  if (v.d != d_) throw InputError("Fock vector dimension mismatch");
  const int d = d_;
  const std::size_t D = static_cast<std::size_t>(d) * d;
  FockVector out;
  out.d = d;
  using K = FockFactor::Kind;
  if ((f.kind == K::LeftMul || f.kind == K::RightMul) && (f.coef.rows() != d || f.coef.cols() != d))
    throw InputError("Fock coefficient dimension mismatch");

  for (const auto& [idx, T] : v.terms) {
    const int m = static_cast<int>(idx.size());
    switch (f.kind) {
      case K::LeftCreate:
      case K::RightCreate: {
        if (m + 1 > limit) break;
        if (m + 1 > truncation_ && !auto_extend_)
          throw ComputationError("Fock truncation overflow: depth " + std::to_string(m + 1) + " > N=" +
                                 std::to_string(truncation_));
        std::vector<int> nidx;
        std::vector<cplx> nt(D * T.size(), 0.0);
        if (f.kind == K::LeftCreate) {
          nidx.push_back(f.index);
          nidx.insert(nidx.end(), idx.begin(), idx.end());
          for (int i = 0; i < d; ++i) std::copy(T.begin(), T.end(), nt.begin() + (i * d + i) * T.size());
        } else {
          nidx = idx;
          nidx.push_back(f.index);
          for (std::size_t r = 0; r < T.size(); ++r)
            for (int i = 0; i < d; ++i) nt[r * D + i * d + i] = T[r];
        }
        accumulate(out, std::move(nidx), std::move(nt));
        break;
      }
      case K::LeftAnnihilate: {
        if (m == 0 || !eta(f.index, idx.front())) break;
        const auto& U = eta_units(f.index, idx.front());
        const std::size_t R = T.size() / (D * D);
        std::vector<cplx> nt(D * R, 0.0);
        for (std::size_t a0 = 0; a0 < D; ++a0) {
          const BElement& M = U[a0];
          for (int i1 = 0; i1 < d; ++i1)
            for (int j1 = 0; j1 < d; ++j1)
              for (std::size_t rest = 0; rest < R; ++rest) {
                const cplx val = T[(a0 * D + i1 * d + j1) * R + rest];
                if (val == 0.0) continue;
                for (int r = 0; r < d; ++r) nt[(r * d + j1) * R + rest] += val * M(r, i1);
              }
        }
        accumulate(out, std::vector<int>(idx.begin() + 1, idx.end()), std::move(nt));
        break;
      }
      case K::RightAnnihilate: {
        if (m == 0 || !eta(idx.back(), f.index)) break;
        const auto& U = eta_units(idx.back(), f.index);
        const std::size_t R = T.size() / (D * D);
        std::vector<cplx> nt(D * R, 0.0);
        for (std::size_t rest = 0; rest < R; ++rest)
          for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
              for (std::size_t am = 0; am < D; ++am) {
                const cplx val = T[(rest * D + i * d + j) * D + am];
                if (val == 0.0) continue;
                const BElement& N = U[am];
                for (int c = 0; c < d; ++c) nt[rest * D + i * d + c] += val * N(j, c);
              }
        accumulate(out, std::vector<int>(idx.begin(), idx.end() - 1), std::move(nt));
        break;
      }
      case K::LeftMul: {
        const std::size_t R = T.size() / D;
        std::vector<cplx> nt(T.size(), 0.0);
        for (int r = 0; r < d; ++r)
          for (int i = 0; i < d; ++i) {
            const cplx b = f.coef(r, i);
            if (b == 0.0) continue;
            for (int j = 0; j < d; ++j)
              for (std::size_t rest = 0; rest < R; ++rest)
                nt[(r * d + j) * R + rest] += b * T[(i * d + j) * R + rest];
          }
        accumulate(out, idx, std::move(nt));
        break;
      }
      case K::RightMul: {
        const std::size_t R = T.size() / D;
        std::vector<cplx> nt(T.size(), 0.0);
        for (std::size_t rest = 0; rest < R; ++rest)
          for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
              const cplx val = T[rest * D + i * d + j];
              if (val == 0.0) continue;
              for (int c = 0; c < d; ++c) nt[rest * D + i * d + c] += val * f.coef(j, c);
            }
        accumulate(out, idx, std::move(nt));
        break;
      }
    }
  }
  return out;
}

FockVector FockSpace::apply(const FockFactor& f, const FockVector& v) const {
  return apply_impl(f, v, std::numeric_limits<int>::max());
}

FockVector FockSpace::apply(const FockOperatorWord& w, const FockVector& v) const {
  FockVector cur = v;
  for (auto it = w.rbegin(); it != w.rend(); ++it) cur = apply(*it, cur);
  return cur;
}

BElement FockSpace::project(const FockVector& v) const {
  BElement b = zero(d_);
  auto it = v.terms.find({});
  if (it == v.terms.end()) return b;
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j) b(i, j) = it->second[i * d_ + j];
  return b;
}

BElement FockSpace::expectation(const FockOperatorWord& w) const {
  if (!auto_extend_) {
    int creations = 0;
    for (const auto& f : w)
      creations += f.kind == FockFactor::Kind::LeftCreate || f.kind == FockFactor::Kind::RightCreate;
    if (creations > truncation_)
      throw ComputationError("Fock truncation overflow: word needs depth " + std::to_string(creations));
  }
  return project(apply(w, FockVector::vacuum(d_)));
}

BElement FockSpace::inner(const FockVector& v, const FockVector& w) const {
  const int d = d_;
  const std::size_t D = static_cast<std::size_t>(d) * d;
  BElement acc = zero(d);
  for (const auto& [iv, Tv] : v.terms)
    for (const auto& [iw, Tw] : w.terms) {
      if (iv.size() != iw.size()) continue;
      const std::size_t m = iv.size();
      bool paired = true;
      for (std::size_t s = 0; s < m; ++s) paired &= eta(iv[s], iw[s]) != nullptr;
      if (!paired) continue;
      for (std::size_t a = 0; a < Tv.size(); ++a) {
        if (Tv[a] == 0.0) continue;
        for (std::size_t b = 0; b < Tw.size(); ++b) {
          if (Tw[b] == 0.0) continue;
          // slot digits, most significant first
          std::vector<std::size_t> da(m + 1), db(m + 1);
          std::size_t x = a, y = b;
          for (std::size_t s = m + 1; s-- > 0;) {
            da[s] = x % D;
            x /= D;
            db[s] = y % D;
            y /= D;
          }
          // E_{b_s}^* = E_{j i}; start with a_0^* b_0 then alternate eta and multiplication
          auto unit = [&](std::size_t code) { return matrix_unit(d, static_cast<int>(code / d) + 1, static_cast<int>(code % d) + 1); };
          BElement cur = unit(db[0]).adjoint() * unit(da[0]);
          for (std::size_t s = 1; s <= m; ++s)
            cur = unit(db[s]).adjoint() * eta(iv[s - 1], iw[s - 1])->apply(cur) * unit(da[s]);
          acc += std::conj(Tw[b]) * Tv[a] * cur;
        }
      }
    }
  return acc;
}

FockModel::FockModel(FockSpace space, std::vector<Entry> entries) : space_(std::move(space)) {
  for (auto& e : entries) {
    if (ops_.count(e.symbol.name)) throw InputError("duplicate symbol '" + e.symbol.name + "'");
    int lower = 0;
    for (const auto& t : e.op) {
      int a = 0;
      for (const auto& f : t.word)
        a += f.kind == FockFactor::Kind::LeftAnnihilate || f.kind == FockFactor::Kind::RightAnnihilate;
      lower = std::max(lower, a);
    }
    lowering_[e.symbol.name] = lower;
    ops_[e.symbol.name] = std::move(e.op);
    symbols_.push_back(std::move(e.symbol));
  }
}

const FockOperator& FockModel::op(const std::string& name) const {
  auto it = ops_.find(name);
  if (it == ops_.end()) throw InputError("unknown symbol '" + name + "'");
  return it->second;
}

FockVector FockModel::apply_factor(const Factor& f, const FockVector& v, int limit) const {
  FockVector out;
  out.d = space_.dim();
  switch (f.kind) {
    case Factor::Kind::Lb: out = space_.apply(FockFactor::Lb(f.coef), v); break;
    case Factor::Kind::Rb: out = space_.apply(FockFactor::Rb(f.coef), v); break;
    case Factor::Kind::Symbol:
      for (const auto& t : op(f.name)) {
        FockVector part = space_.apply(t.word, v);
        part *= t.coef;
        out += part;
      }
      break;
  }
  for (auto it = out.terms.begin(); it != out.terms.end();) {
    if (static_cast<int>(it->first.size()) > limit) it = out.terms.erase(it);
    else ++it;
  }
  return out;
}

FockVector FockModel::apply(const Monomial& word, const FockVector& v) const {
  FockVector cur = v;
  for (auto it = word.rbegin(); it != word.rend(); ++it) cur = apply_factor(*it, cur, std::numeric_limits<int>::max());
  return cur;
}

BElement FockModel::eval(const Monomial& word) const {
  const int n = static_cast<int>(word.size());
  std::vector<int> capacity(n + 1, 0);  // capacity[k] = annihilations available in factors [0, k)
  for (int k = 0; k < n; ++k)
    capacity[k + 1] = capacity[k] + (word[k].kind == Factor::Kind::Symbol ? lowering_.at(word[k].name) : 0);
  FockVector cur = FockVector::vacuum(space_.dim());
  for (int k = n - 1; k >= 0; --k) {
    cur = apply_factor(word[k], cur, capacity[k]);
    if (cur.terms.empty()) return zero(space_.dim());
  }
  return space_.project(cur);
}

std::shared_ptr<FockModel> make_bisemicircular(const std::vector<CPMap>& eta_left,
                                               const std::vector<CPMap>& eta_right) {
  if (eta_left.empty() && eta_right.empty()) throw InputError("bi-semicircular model needs at least one covariance");
  const int d = eta_left.empty() ? eta_right.front().dim() : eta_left.front().dim();
  std::map<std::pair<int, int>, CPMap> cov;
  std::vector<FockModel::Entry> entries;
  const int p = static_cast<int>(eta_left.size());
  for (int i = 1; i <= p; ++i) {
    if (eta_left[i - 1].dim() != d) throw InputError("covariance maps must share dimension d");
    cov.emplace(std::make_pair(i, i), eta_left[i - 1]);
    const std::string name = "S" + std::to_string(i);
    entries.push_back({{name, Side::Left, false, name, ""}, left_semicircular(i)});
  }
  for (int j = 1; j <= static_cast<int>(eta_right.size()); ++j) {
    if (eta_right[j - 1].dim() != d) throw InputError("covariance maps must share dimension d");
    cov.emplace(std::make_pair(p + j, p + j), eta_right[j - 1]);
    const std::string name = "D" + std::to_string(j);
    entries.push_back({{name, Side::Right, false, name, ""}, right_semicircular(p + j)});
  }
  return std::make_shared<FockModel>(FockSpace(d, std::move(cov)), std::move(entries));
}

std::shared_ptr<FockModel> make_circular_pair(double t) {
  if (t < 0) throw InputError("perturbation parameter must be nonnegative");
  std::map<std::pair<int, int>, CPMap> cov;
  const int indices = t > 0 ? 8 : 4;
  for (int k = 1; k <= indices; ++k) cov.emplace(std::make_pair(k, k), CPMap::identity(1));
  const double h = 1.0 / std::sqrt(2.0);
  const cplx I(0.0, 1.0);
  auto circ = [&](int a, int b, bool right, bool star) {
    auto semi = right ? right_semicircular : left_semicircular;
    return semi(a, h) + semi(b, (star ? -I : I) * h);
  };
  auto build = [&](bool right, bool star) {
    FockOperator op = right ? circ(3, 4, true, star) : circ(1, 2, false, star);
    if (t > 0) op = op + std::sqrt(t) * (right ? circ(7, 8, true, star) : circ(5, 6, false, star));
    return op;
  };
  std::vector<FockModel::Entry> entries = {
      {{"c_l", Side::Left, false, "c", "c_l*"}, build(false, false)},
      {{"c_l*", Side::Left, true, "c", "c_l"}, build(false, true)},
      {{"c_r", Side::Right, false, "c", "c_r*"}, build(true, false)},
      {{"c_r*", Side::Right, true, "c", "c_r"}, build(true, true)},
  };
  return std::make_shared<FockModel>(FockSpace(1, std::move(cov)), std::move(entries));
}

}  // namespace bifree

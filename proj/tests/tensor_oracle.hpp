#pragma once

// Direct evaluation on H (x) C^d (x) C^d, with H a truncated scalar full Fock space written out
// as sparse matrices. Left matrices act on the middle factor, right matrices by transpose on the last.

#include <map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "bifree/opalgebra.hpp"

namespace oracle {

using bifree::cplx;
using Sparse = Eigen::SparseMatrix<cplx>;

class ScalarFock {
 public:
  // variance[k-1] for index k.
  ScalarFock(std::vector<double> variance, int depth) : var_(std::move(variance)) {
    std::vector<std::vector<int>> layer{{}};
    words_.push_back({});
    for (int m = 1; m <= depth; ++m) {
      std::vector<std::vector<int>> next;
      for (const auto& w : layer)
        for (int k = 1; k <= static_cast<int>(var_.size()); ++k) {
          auto x = w;
          x.push_back(k);
          next.push_back(x);
          words_.push_back(x);
        }
      layer = std::move(next);
    }
    for (std::size_t i = 0; i < words_.size(); ++i) index_[words_[i]] = static_cast<int>(i);
  }

  int size() const { return static_cast<int>(words_.size()); }

  Sparse l(int k) const { return create(k, true); }
  Sparse r(int k) const { return create(k, false); }
  Sparse lstar(int k) const { return annihilate(k, true); }
  Sparse rstar(int k) const { return annihilate(k, false); }
  Sparse zero() const { return Sparse(size(), size()); }
  Sparse id() const {
    Sparse m(size(), size());
    m.setIdentity();
    return m;
  }

 private:
  Sparse create(int k, bool left) const {
    std::vector<Eigen::Triplet<cplx>> t;
    for (std::size_t c = 0; c < words_.size(); ++c) {
      auto w = words_[c];
      if (left)
        w.insert(w.begin(), k);
      else
        w.push_back(k);
      auto it = index_.find(w);
      if (it != index_.end()) t.emplace_back(it->second, static_cast<int>(c), 1.0);
    }
    Sparse m(size(), size());
    m.setFromTriplets(t.begin(), t.end());
    return m;
  }

  Sparse annihilate(int k, bool left) const {
    std::vector<Eigen::Triplet<cplx>> t;
    for (std::size_t c = 0; c < words_.size(); ++c) {
      const auto& w = words_[c];
      if (w.empty() || (left ? w.front() : w.back()) != k) continue;
      std::vector<int> x = left ? std::vector<int>(w.begin() + 1, w.end()) : std::vector<int>(w.begin(), w.end() - 1);
      t.emplace_back(index_.at(x), static_cast<int>(c), var_[k - 1]);
    }
    Sparse m(size(), size());
    m.setFromTriplets(t.begin(), t.end());
    return m;
  }

  std::vector<double> var_;
  std::vector<std::vector<int>> words_;
  std::map<std::vector<int>, int> index_;
};

// sum_ij z_ij (x) E_ij on one side.
struct LiftedOp {
  bool left = true;
  std::vector<std::vector<Sparse>> z;  // d x d
};

class TensorLift {
 public:
  TensorLift(int h, int d) : h_(h), d_(d) {}

  // state[i*d + j] is the H-component at e_i (x) e_j
  using State = std::vector<Eigen::VectorXcd>;

  State apply(const LiftedOp& op, const State& v) const {
    State out(d_ * d_, Eigen::VectorXcd::Zero(h_));
    for (int i = 0; i < d_; ++i)
      for (int j = 0; j < d_; ++j) {
        const Sparse& z = op.z[i][j];
        if (z.nonZeros() == 0) continue;
        for (int o = 0; o < d_; ++o) {
          if (op.left)
            out[i * d_ + o] += z * v[j * d_ + o];  // E_ij on the middle factor
          else
            out[o * d_ + j] += z * v[o * d_ + i];  // E_ij^T = E_ji on the last factor
        }
      }
    return out;
  }

  // E(T)_ij = sum_k <Omega (x) e_i (x) e_j, T(Omega (x) e_k (x) e_k)>
  bifree::BElement expectation(const std::vector<const LiftedOp*>& word) const {
    bifree::BElement out = bifree::BElement::Zero(d_, d_);
    for (int k = 0; k < d_; ++k) {
      State v(d_ * d_, Eigen::VectorXcd::Zero(h_));
      v[k * d_ + k](0) = 1.0;
      for (auto it = word.rbegin(); it != word.rend(); ++it) v = apply(**it, v);
      for (int i = 0; i < d_; ++i)
        for (int j = 0; j < d_; ++j) out(i, j) += v[i * d_ + j](0);
    }
    return out;
  }

 private:
  int h_, d_;
};

}  // namespace oracle

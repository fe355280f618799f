#include "bifree/bnc.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <shared_mutex>
#include <sstream>
#include <unordered_map>

#include "bifree/errors.hpp"

namespace bifree {

char side_char(Side s) { return s == Side::Left ? 'l' : 'r'; }

ChiWord::ChiWord(std::vector<Side> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw InputError("chi-word must have length >= 1");
  const int n = size();
  s_.reserve(n);
  for (int i = 1; i <= n; ++i)
    if (labels_[i - 1] == Side::Left) s_.push_back(i);
  for (int i = n; i >= 1; --i)
    if (labels_[i - 1] == Side::Right) s_.push_back(i);
  inv_.assign(n, 0);
  for (int k = 0; k < n; ++k) inv_[s_[k] - 1] = k + 1;
}

ChiWord ChiWord::parse(std::string_view text) {
  std::vector<Side> labels;
  labels.reserve(text.size());
  for (char c : text) {
    if (c == 'l' || c == 'L') {
      labels.push_back(Side::Left);
    } else if (c == 'r' || c == 'R') {
      labels.push_back(Side::Right);
    } else {
      throw InputError(std::string("chi-word may only contain l and r, got '") + c + "'");
    }
  }
  return ChiWord(std::move(labels));
}

ChiWord ChiWord::uniform(int n, Side s) { return ChiWord(std::vector<Side>(n, s)); }

Side ChiWord::at(int i) const {
  if (i < 1 || i > size()) throw InputError("chi index out of range");
  return labels_[i - 1];
}

std::string ChiWord::str() const {
  std::string out;
  for (Side s : labels_) out.push_back(side_char(s));
  return out;
}

ChiWord ChiWord::restrict(const std::vector<int>& positions) const {
  std::vector<Side> labels;
  labels.reserve(positions.size());
  for (int p : positions) labels.push_back(at(p));
  return ChiWord(std::move(labels));
}

std::vector<int> s_chi(const ChiWord& chi) { return chi.s(); }

bool chi_less(int i, int j, const ChiWord& chi) {
  const int n = chi.size();
  if (i < 1 || i > n || j < 1 || j > n) throw InputError("chi_less: index out of range");
  if (i == j) throw InputError("chi_less: indices must differ");
  return chi.s_inverse()[i - 1] < chi.s_inverse()[j - 1];
}

Blocks canonicalize(Blocks blocks) {
  for (auto& b : blocks) std::sort(b.begin(), b.end());
  std::sort(blocks.begin(), blocks.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return blocks;
}

void validate_cover(const Blocks& blocks, int n) {
  std::vector<char> seen(n, 0);
  int count = 0;
  for (const auto& b : blocks) {
    if (b.empty()) throw InputError("partition has an empty block");
    for (int i : b) {
      if (i < 1 || i > n) throw InputError("partition index out of range 1.." + std::to_string(n));
      if (seen[i - 1]) throw InputError("partition blocks are not disjoint");
      seen[i - 1] = 1;
      ++count;
    }
  }
  if (count != n) throw InputError("partition does not cover 1.." + std::to_string(n));
}

bool is_noncrossing(const Blocks& blocks) {
  int n = 0;
  for (const auto& b : blocks) n += static_cast<int>(b.size());
  std::vector<int> label(n + 1, -1);
  for (std::size_t k = 0; k < blocks.size(); ++k)
    for (int i : blocks[k]) label[i] = static_cast<int>(k);
  // a < b < c < d with a,c in one block and b,d in another.
  // Scan with a stack of open blocks: an element may only join the block on top.
  std::vector<int> last(blocks.size(), 0);
  for (std::size_t k = 0; k < blocks.size(); ++k) last[k] = *std::max_element(blocks[k].begin(), blocks[k].end());
  std::vector<int> stack;
  std::vector<char> opened(blocks.size(), 0);
  for (int i = 1; i <= n; ++i) {
    const int b = label[i];
    if (!opened[b]) {
      opened[b] = 1;
      stack.push_back(b);
    } else if (stack.empty() || stack.back() != b) {
      return false;
    }
    if (i == last[b]) stack.pop_back();
  }
  return true;
}

Blocks to_chi_order(const Blocks& blocks, const ChiWord& chi) {
  Blocks out = blocks;
  for (auto& b : out)
    for (int& i : b) i = chi.s_inverse()[i - 1];
  return canonicalize(std::move(out));
}

Blocks from_chi_order(const Blocks& nc_blocks, const ChiWord& chi) {
  Blocks out = nc_blocks;
  for (auto& b : out)
    for (int& i : b) i = chi.s()[i - 1];
  return canonicalize(std::move(out));
}

bool is_bnc(const Blocks& blocks, const ChiWord& chi) {
  validate_cover(blocks, chi.size());
  return is_noncrossing(to_chi_order(blocks, chi));
}

namespace {

std::vector<int> labels_of(const Blocks& blocks, int n) {
  std::vector<int> label(n, -1);
  for (std::size_t k = 0; k < blocks.size(); ++k)
    for (int i : blocks[k]) label[i - 1] = static_cast<int>(k);
  return label;
}

// Restricted growth string of a canonical partition, as a compact key.
std::string rgs_key(const Blocks& canonical, int n) {
  std::string key(static_cast<std::size_t>(n), '\0');
  for (std::size_t k = 0; k < canonical.size(); ++k)
    for (int i : canonical[k]) key[i - 1] = static_cast<char>(k);
  return key;
}

Blocks from_labels(const std::vector<int>& label) {
  std::map<int, std::vector<int>> groups;
  for (std::size_t i = 0; i < label.size(); ++i) groups[label[i]].push_back(static_cast<int>(i) + 1);
  Blocks out;
  for (auto& [_, b] : groups) out.push_back(std::move(b));
  return canonicalize(std::move(out));
}

}  // namespace

BncPartition::BncPartition(ChiWord chi, Blocks blocks) : chi_(std::move(chi)) {
  validate_cover(blocks, chi_.size());
  blocks_ = canonicalize(std::move(blocks));
  if (!is_noncrossing(to_chi_order(blocks_, chi_)))
    throw InputError("partition " + str() + " is not bi-non-crossing for chi=" + chi_.str());
  label_ = labels_of(blocks_, chi_.size());
}

BncPartition BncPartition::zero(const ChiWord& chi) {
  Blocks b;
  for (int i = 1; i <= chi.size(); ++i) b.push_back({i});
  return BncPartition(chi, std::move(b));
}

BncPartition BncPartition::one(const ChiWord& chi) {
  std::vector<int> all(chi.size());
  std::iota(all.begin(), all.end(), 1);
  return BncPartition(chi, Blocks{all});
}

std::string BncPartition::str() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    if (k) os << ',';
    os << '{';
    for (std::size_t j = 0; j < blocks_[k].size(); ++j) os << (j ? "," : "") << blocks_[k][j];
    os << '}';
  }
  os << '}';
  return os.str();
}

std::uint64_t catalan(int n) {
  std::uint64_t c = 1;
  for (int k = 0; k < n; ++k) c = c * 2 * (2 * k + 1) / (k + 2);
  return c;
}

namespace {

// Depth-first generation of NC partitions as restricted growth strings.
// Only blocks on the open stack may receive the next element; joining a block
// closes every block opened after it.
template <class Visit>
void nc_dfs(int n, const std::vector<int>* forced, Visit&& visit) {
  std::vector<int> label(n, -1);
  std::vector<int> stack;
  int nblocks = 0;
  auto rec = [&](auto&& self, int i) -> void {
    if (i == n) {
      visit(label);
      return;
    }
    // forced: forced[i] = index of an earlier element that must share i's block, or -1
    const int must = forced ? (*forced)[i] : -1;
    if (must >= 0) {
      const int b = label[must];
      auto it = std::find(stack.begin(), stack.end(), b);
      if (it == stack.end()) return;
      std::vector<int> saved(it + 1, stack.end());
      stack.erase(it + 1, stack.end());
      label[i] = b;
      self(self, i + 1);
      stack.insert(stack.end(), saved.begin(), saved.end());
      return;
    }
    for (int b = 0; b < nblocks; ++b) {
      auto it = std::find(stack.begin(), stack.end(), b);
      if (it == stack.end()) continue;
      std::vector<int> saved(it + 1, stack.end());
      stack.erase(it + 1, stack.end());
      label[i] = b;
      self(self, i + 1);
      stack.insert(stack.end(), saved.begin(), saved.end());
    }
    label[i] = nblocks++;
    stack.push_back(label[i]);
    self(self, i + 1);
    stack.pop_back();
    --nblocks;
  };
  rec(rec, 0);
}

}  // namespace

std::vector<Blocks> enumerate_nc(int n) {
  if (n < 1) throw InputError("enumerate_nc: n must be >= 1");
  std::vector<Blocks> out;
  out.reserve(catalan(n));
  nc_dfs(n, nullptr, [&](const std::vector<int>& label) { out.push_back(from_labels(label)); });
  return out;
}

std::vector<BncPartition> enumerate_bnc(const ChiWord& chi, int bound) {
  if (chi.size() > bound)
    throw InputError("enumerate_bnc: n=" + std::to_string(chi.size()) + " exceeds bound " + std::to_string(bound));
  std::vector<BncPartition> out;
  for (const auto& nc : enumerate_nc(chi.size())) out.emplace_back(chi, from_chi_order(nc, chi));
  return out;
}

namespace {

void require_same_chi(const BncPartition& a, const BncPartition& b) {
  if (!(a.chi() == b.chi())) throw InputError("partitions live over different chi-words");
}

bool refines(const Blocks& fine, const std::vector<int>& coarse_label) {
  for (const auto& b : fine)
    for (int i : b)
      if (coarse_label[i - 1] != coarse_label[b.front() - 1]) return false;
  return true;
}

}  // namespace

bool lattice_leq(const BncPartition& sigma, const BncPartition& pi) {
  require_same_chi(sigma, pi);
  for (const auto& b : sigma.blocks())
    for (int i : b)
      if (pi.block_of(i) != pi.block_of(b.front())) return false;
  return true;
}

BncPartition lattice_join(const BncPartition& sigma, const BncPartition& pi) {
  require_same_chi(sigma, pi);
  const int n = sigma.size();
  // Join in P(n) on the chi-ordered picture, then merge crossing blocks until
  // non-crossing; the P(n) join alone can cross.
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto unite = [&](int a, int b) { parent[find(a)] = find(b); };
  for (const Blocks& bl : {sigma.nc_image(), pi.nc_image()})
    for (const auto& b : bl)
      for (int i : b) unite(i - 1, b.front() - 1);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int a = 0; a < n && !changed; ++a)
      for (int b = a + 1; b < n && !changed; ++b) {
        if (find(a) == find(b)) continue;
        for (int c = b + 1; c < n && !changed; ++c) {
          if (find(c) != find(a)) continue;
          for (int d = c + 1; d < n; ++d)
            if (find(d) == find(b)) {
              unite(a, b);
              changed = true;
              break;
            }
        }
      }
  }
  std::vector<int> label(n);
  for (int i = 0; i < n; ++i) label[i] = find(i);
  BncPartition out(sigma.chi(), from_chi_order(from_labels(label), sigma.chi()));
  if (!lattice_leq(sigma, out) || !lattice_leq(pi, out))
    throw ComputationError("lattice_join: internal consistency check failed");
  return out;
}

BncPartition lattice_meet(const BncPartition& sigma, const BncPartition& pi) {
  require_same_chi(sigma, pi);
  const int n = sigma.size();
  std::vector<int> label(n);
  for (int i = 1; i <= n; ++i) label[i - 1] = sigma.block_of(i) * (pi.block_count() + 1) + pi.block_of(i);
  return BncPartition(sigma.chi(), from_labels(label));
}

namespace {

struct MobiusCache {
  std::shared_mutex mu;
  std::unordered_map<std::string, std::int64_t> values;
};

MobiusCache& mobius_cache() {
  static MobiusCache cache;
  return cache;
}

std::int64_t mobius_to_top(const Blocks& sigma, int m);

// mu(sigma, pi) in NC(n) factorizes over the blocks of pi.
std::int64_t mobius_nc_impl(const Blocks& sigma, const Blocks& pi, int n) {
  const auto pi_label = labels_of(pi, n);
  if (!refines(sigma, pi_label)) return 0;
  std::int64_t result = 1;
  for (const auto& v : pi) {
    // sigma restricted to v, relabelled onto 1..|v| in order
    std::vector<int> pos(n + 1, 0);
    for (std::size_t k = 0; k < v.size(); ++k) pos[v[k]] = static_cast<int>(k) + 1;
    Blocks local;
    for (const auto& b : sigma) {
      if (pos[b.front()] == 0) continue;
      std::vector<int> lb;
      for (int i : b) lb.push_back(pos[i]);
      local.push_back(std::move(lb));
    }
    result *= mobius_to_top(canonicalize(std::move(local)), static_cast<int>(v.size()));
    if (result == 0) break;
  }
  return result;
}

// mu(sigma, 1_m) from the defining recursion mu(sigma,1) = -sum_{sigma<=tau<1} mu(sigma,tau).
std::int64_t mobius_to_top(const Blocks& sigma, int m) {
  if (sigma.size() == 1) return 1;
  const std::string key = rgs_key(sigma, m);
  auto& cache = mobius_cache();
  {
    std::shared_lock lock(cache.mu);
    auto it = cache.values.find(key);
    if (it != cache.values.end()) return it->second;
  }
  std::vector<int> forced(m, -1);
  for (const auto& b : sigma)
    for (std::size_t k = 1; k < b.size(); ++k) forced[b[k] - 1] = b.front() - 1;
  std::int64_t sum = 0;
  nc_dfs(m, &forced, [&](const std::vector<int>& label) {
    const Blocks tau = from_labels(label);
    if (tau.size() == 1) return;
    sum += mobius_nc_impl(sigma, tau, m);
  });
  const std::int64_t value = -sum;
  std::unique_lock lock(cache.mu);
  cache.values.emplace(key, value);
  return value;
}

}  // namespace

std::int64_t mobius_nc(const Blocks& sigma, const Blocks& pi, int n) {
  validate_cover(sigma, n);
  validate_cover(pi, n);
  return mobius_nc_impl(canonicalize(sigma), canonicalize(pi), n);
}

std::int64_t mobius_bnc(const BncPartition& sigma, const BncPartition& pi) {
  require_same_chi(sigma, pi);
  return mobius_nc_impl(sigma.nc_image(), pi.nc_image(), sigma.size());
}

BncPartition restrict_to(const BncPartition& pi, const std::vector<int>& positions) {
  std::vector<int> sorted = positions;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> pos(pi.size() + 1, 0);
  for (std::size_t k = 0; k < sorted.size(); ++k) pos[sorted[k]] = static_cast<int>(k) + 1;
  Blocks local;
  for (const auto& b : pi.blocks()) {
    std::vector<int> lb;
    for (int i : b)
      if (pos[i]) lb.push_back(pos[i]);
    if (!lb.empty()) local.push_back(std::move(lb));
  }
  return BncPartition(pi.chi().restrict(sorted), std::move(local));
}

}  // namespace bifree

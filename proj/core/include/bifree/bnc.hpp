#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace bifree {

enum class Side : std::uint8_t { Left, Right };

char side_char(Side s);

// Sequence of side labels. Positions are 1-based throughout the public API.
class ChiWord {
 public:
  ChiWord() = default;
  explicit ChiWord(std::vector<Side> labels);

  // Parses strings over {l, r} (case-insensitive), e.g. "llrrl".
  static ChiWord parse(std::string_view text);
  static ChiWord uniform(int n, Side s);

  int size() const { return static_cast<int>(labels_.size()); }
  Side at(int i) const;  // 1-based
  const std::vector<Side>& labels() const { return labels_; }
  std::string str() const;

  // s[k-1] = s_chi(k): left positions increasing, then right positions decreasing.
  const std::vector<int>& s() const { return s_; }
  // inv[i-1] = position of i in the chi-order (1-based).
  const std::vector<int>& s_inverse() const { return inv_; }

  ChiWord restrict(const std::vector<int>& positions) const;

  friend bool operator==(const ChiWord& a, const ChiWord& b) { return a.labels_ == b.labels_; }

 private:
  std::vector<Side> labels_;
  std::vector<int> s_;
  std::vector<int> inv_;
};

using Blocks = std::vector<std::vector<int>>;

std::vector<int> s_chi(const ChiWord& chi);
bool chi_less(int i, int j, const ChiWord& chi);

// Sorts each block and orders blocks by their minimum.
Blocks canonicalize(Blocks blocks);
// Throws InputError unless blocks are disjoint, nonempty and cover {1..n}.
void validate_cover(const Blocks& blocks, int n);
bool is_noncrossing(const Blocks& blocks);
bool is_bnc(const Blocks& blocks, const ChiWord& chi);

// s_chi^{-1} applied entrywise; the image is non-crossing iff blocks are in BNC(chi).
Blocks to_chi_order(const Blocks& blocks, const ChiWord& chi);
Blocks from_chi_order(const Blocks& nc_blocks, const ChiWord& chi);

class BncPartition {
 public:
  BncPartition() = default;
  // Validates cover and the bi-non-crossing property.
  BncPartition(ChiWord chi, Blocks blocks);

  static BncPartition zero(const ChiWord& chi);
  static BncPartition one(const ChiWord& chi);

  int size() const { return chi_.size(); }
  const ChiWord& chi() const { return chi_; }
  const Blocks& blocks() const { return blocks_; }
  int block_count() const { return static_cast<int>(blocks_.size()); }
  // block index (into blocks()) containing position i (1-based)
  int block_of(int i) const { return label_[i - 1]; }
  Blocks nc_image() const { return to_chi_order(blocks_, chi_); }
  std::string str() const;

  friend bool operator==(const BncPartition& a, const BncPartition& b) {
    return a.chi_ == b.chi_ && a.blocks_ == b.blocks_;
  }

 private:
  ChiWord chi_;
  Blocks blocks_;
  std::vector<int> label_;
};

inline constexpr int kDefaultEnumerationBound = 12;

std::uint64_t catalan(int n);

// NC(n) in restricted-growth-string lexicographic order.
std::vector<Blocks> enumerate_nc(int n);
std::vector<BncPartition> enumerate_bnc(const ChiWord& chi, int bound = kDefaultEnumerationBound);

bool lattice_leq(const BncPartition& sigma, const BncPartition& pi);
BncPartition lattice_join(const BncPartition& sigma, const BncPartition& pi);
BncPartition lattice_meet(const BncPartition& sigma, const BncPartition& pi);

// Exact Moebius function of BNC(chi); 0 unless sigma <= pi.
std::int64_t mobius_bnc(const BncPartition& sigma, const BncPartition& pi);
// Moebius function of NC(n) on canonical non-crossing block lists.
std::int64_t mobius_nc(const Blocks& sigma, const Blocks& pi, int n);

// Restriction of a partition to a union of its blocks, relabelled onto 1..|V|
// in natural order, together with the restricted chi-word.
BncPartition restrict_to(const BncPartition& pi, const std::vector<int>& positions);

}  // namespace bifree

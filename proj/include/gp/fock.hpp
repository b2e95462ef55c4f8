#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "gp/gaussian.hpp"

namespace gp {

// Occupation bits of the live fermion modes (bit i = mode i in JW order) and
// two bits per bosonic link holding the level index 0,1,2 <-> +1,0,-1.
struct FockKey {
  std::uint64_t f = 0;
  std::uint64_t b = 0;
  bool operator==(const FockKey& o) const { return f == o.f && b == o.b; }
};

struct FockKeyHash {
  std::size_t operator()(const FockKey& k) const {
    std::uint64_t h = k.f * 0x9E3779B97F4A7C15ull;
    h ^= k.b + 0x632BE59BD9B4E019ull + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

inline int link_level(std::uint64_t b, int link) { return 1 - static_cast<int>((b >> (2 * link)) & 3u); }
inline std::uint64_t with_link_level(std::uint64_t b, int link, int level) {
  b &= ~(std::uint64_t(3) << (2 * link));
  return b | (std::uint64_t(1 - level) << (2 * link));
}

// Sparse state on an explicit occupation basis.  Fermion modes are ordered
// as listed in `modes` (Jordan-Wigner line); links carry no sign.
struct FockState {
  std::vector<std::string> modes;
  std::vector<std::string> links;
  std::unordered_map<FockKey, cd, FockKeyHash> amp;
  std::size_t cap = std::size_t(1) << 24;

  static FockState vacuum();
  int mode(const std::string& label) const;
  int link(const std::string& label) const;
  double norm2() const;
  void prune(double tol = 0.0);
};

struct BlockEntry {
  std::uint32_t f = 0;          // local fermion bits
  std::vector<int> levels;      // one level per local link
  cd amp;
};

// Tensor product with a block whose modes are appended at the end of the JW
// line.  No sign arises for this placement.
void append_block(FockState& s, const std::vector<std::string>& modes,
                  const std::vector<std::string>& links, const std::vector<BlockEntry>& block);

// Applies <0| exp(c_second c_first) on the two modes (c_first acts first) and
// removes both modes.
void project_pair(FockState& s, int first, int second);

// Projects a mode onto the empty state and removes it.
void project_empty(FockState& s, int mode);

// New JW order: order[i] is the old index of the mode placed at position i.
void reorder_modes(FockState& s, const std::vector<int>& order);

FockState apply_fermion(const FockState& s, int mode, bool create);
FockState apply_link(const FockState& s, int link, const Eigen::Matrix3cd& op);
cd inner(const FockState& bra, const FockState& ket);
FockState add(const FockState& a, const FockState& b, cd cb = 1.0);

// (-1)^(number of occupied modes below `mode`)
inline int jw_sign(std::uint64_t f, int mode) {
  std::uint64_t below = mode == 0 ? 0 : (f & ((std::uint64_t(1) << mode) - 1));
  return (__builtin_popcountll(below) & 1) ? -1 : 1;
}

}  // namespace gp

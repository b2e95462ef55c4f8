#include "gp/fock.hpp"

#include <algorithm>
#include <numeric>

namespace gp {

namespace {

std::uint64_t remove_bit(std::uint64_t f, int i) {
  const std::uint64_t low = f & ((std::uint64_t(1) << i) - 1);
  return low | ((f >> (i + 1)) << i);
}

void check_cap(const FockState& s, std::size_t n) {
  if (n > s.cap)
    throw ResourceError("oracle state exceeds the amplitude cap", static_cast<double>(n));
}

}  // namespace

FockState FockState::vacuum() {
  FockState s;
  s.amp[FockKey{}] = 1.0;
  return s;
}

int FockState::mode(const std::string& label) const {
  auto it = std::find(modes.begin(), modes.end(), label);
  if (it == modes.end()) throw std::out_of_range("no fermion mode " + label);
  return static_cast<int>(it - modes.begin());
}

int FockState::link(const std::string& label) const {
  auto it = std::find(links.begin(), links.end(), label);
  if (it == links.end()) throw std::out_of_range("no link " + label);
  return static_cast<int>(it - links.begin());
}

double FockState::norm2() const {
  double n = 0;
  for (auto& [k, v] : amp) n += std::norm(v);
  return n;
}

void FockState::prune(double tol) {
  for (auto it = amp.begin(); it != amp.end();)
    it = std::abs(it->second) <= tol ? amp.erase(it) : std::next(it);
}

void append_block(FockState& s, const std::vector<std::string>& modes,
                  const std::vector<std::string>& links, const std::vector<BlockEntry>& block) {
  const int nf = static_cast<int>(s.modes.size());
  const int nb = static_cast<int>(s.links.size());
  if (nf + modes.size() > 64 || nb + links.size() > 32)
    throw ResourceError("too many live modes for the oracle key", nf + modes.size());
  check_cap(s, s.amp.size() * block.size());
  std::unordered_map<FockKey, cd, FockKeyHash> out;
  out.reserve(s.amp.size() * block.size());
  for (auto& [k, v] : s.amp)
    for (const BlockEntry& e : block) {
      FockKey n{k.f | (std::uint64_t(e.f) << nf), k.b};
      for (std::size_t j = 0; j < links.size(); ++j) n.b = with_link_level(n.b, nb + static_cast<int>(j), e.levels[j]);
      out[n] += v * e.amp;
    }
  s.amp = std::move(out);
  s.modes.insert(s.modes.end(), modes.begin(), modes.end());
  s.links.insert(s.links.end(), links.begin(), links.end());
}

void project_pair(FockState& s, int first, int second) {
  std::unordered_map<FockKey, cd, FockKeyHash> out;
  out.reserve(s.amp.size());
  const std::uint64_t m1 = std::uint64_t(1) << first, m2 = std::uint64_t(1) << second;
  const int hi = std::max(first, second), lo = std::min(first, second);
  for (auto& [k, v] : s.amp) {
    const bool o1 = k.f & m1, o2 = k.f & m2;
    if (o1 != o2) continue;
    cd a = v;
    std::uint64_t f = k.f;
    if (o1) {
      a *= jw_sign(f, first);
      f &= ~m1;
      a *= jw_sign(f, second);
      f &= ~m2;
    }
    f = remove_bit(remove_bit(f, hi), lo);
    out[FockKey{f, k.b}] += a;
  }
  s.amp = std::move(out);
  s.modes.erase(s.modes.begin() + hi);
  s.modes.erase(s.modes.begin() + lo);
}

void project_empty(FockState& s, int mode) {
  std::unordered_map<FockKey, cd, FockKeyHash> out;
  out.reserve(s.amp.size());
  const std::uint64_t m = std::uint64_t(1) << mode;
  for (auto& [k, v] : s.amp)
    if (!(k.f & m)) out[FockKey{remove_bit(k.f, mode), k.b}] += v;
  s.amp = std::move(out);
  s.modes.erase(s.modes.begin() + mode);
}

void reorder_modes(FockState& s, const std::vector<int>& order) {
  const int n = static_cast<int>(s.modes.size());
  if (static_cast<int>(order.size()) != n) throw ShapeError("reorder size mismatch");
  std::unordered_map<FockKey, cd, FockKeyHash> out;
  out.reserve(s.amp.size());
  for (auto& [k, v] : s.amp) {
    std::uint64_t f = 0;
    // sign of sorting the occupied modes of the new order back to the old one
    int inversions = 0;
    for (int i = 0; i < n; ++i) {
      if (!(k.f >> order[i] & 1)) continue;
      f |= std::uint64_t(1) << i;
      for (int j = 0; j < i; ++j)
        if ((k.f >> order[j] & 1) && order[j] > order[i]) ++inversions;
    }
    out[FockKey{f, k.b}] += (inversions & 1) ? -v : v;
  }
  s.amp = std::move(out);
  std::vector<std::string> m(n);
  for (int i = 0; i < n; ++i) m[i] = s.modes[order[i]];
  s.modes = std::move(m);
}

FockState apply_fermion(const FockState& s, int mode, bool create) {
  FockState r;
  r.modes = s.modes;
  r.links = s.links;
  r.cap = s.cap;
  const std::uint64_t m = std::uint64_t(1) << mode;
  for (auto& [k, v] : s.amp) {
    const bool occ = k.f & m;
    if (occ == create) continue;
    r.amp[FockKey{k.f ^ m, k.b}] += v * double(jw_sign(k.f, mode));
  }
  return r;
}

FockState apply_link(const FockState& s, int link, const Eigen::Matrix3cd& op) {
  FockState r;
  r.modes = s.modes;
  r.links = s.links;
  r.cap = s.cap;
  for (auto& [k, v] : s.amp) {
    const int col = 1 - link_level(k.b, link);
    for (int row = 0; row < 3; ++row)
      if (op(row, col) != 0.0) r.amp[FockKey{k.f, with_link_level(k.b, link, 1 - row)}] += op(row, col) * v;
  }
  return r;
}

cd inner(const FockState& bra, const FockState& ket) {
  cd acc = 0;
  const bool small = bra.amp.size() < ket.amp.size();
  const auto& a = small ? bra.amp : ket.amp;
  const auto& b = small ? ket.amp : bra.amp;
  for (auto& [k, v] : a) {
    auto it = b.find(k);
    if (it == b.end()) continue;
    acc += small ? std::conj(v) * it->second : std::conj(it->second) * v;
  }
  return acc;
}

FockState add(const FockState& a, const FockState& b, cd cb) {
  FockState r = a;
  for (auto& [k, v] : b.amp) r.amp[k] += cb * v;
  return r;
}

}  // namespace gp

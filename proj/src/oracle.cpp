#include "gp/oracle.hpp"

#include <cmath>

#include "gp/errors.hpp"

namespace gp {

namespace {

std::vector<BlockEntry> vertex_block(const PepsParameters& p, Parity parity, AbVariant variant, bool gauged) {
  const VecC v = gauged_fiducial(p, parity, variant);
  std::vector<BlockEntry> block;
  std::map<unsigned, cd> fermionic;
  for (int i = 0; i < kLocalDim; ++i) {
    if (v(i) == 0.0) continue;
    if (gauged) block.push_back({local_fbits(i), {local_s_level(i), local_t_level(i)}, v(i)});
    else fermionic[local_fbits(i)] += v(i);
  }
  for (auto& [f, a] : fermionic) block.push_back({f, {}, a});
  return block;
}

std::vector<std::string> vertex_modes(Parity parity, int x1, int x2) {
  std::vector<std::string> m;
  for (const std::string& name : fiducial_mode_order(parity)) m.push_back(site_label(name, x1, x2));
  return m;
}

void pair_off(FockState& s, const std::string& first, const std::string& second) {
  project_pair(s, s.mode(first), s.mode(second));
}

void empty_off(FockState& s, const std::string& label) { project_empty(s, s.mode(label)); }

FockState contract(const PepsParameters& p, int Lx, int Ly, bool torus, AbVariant variant, bool gauged,
                   std::size_t cap) {
  if (Lx < 1 || Ly < 1) throw GeometryError("empty oracle lattice");
  FockState s = FockState::vacuum();
  s.cap = cap;
  for (int x1 = 0; x1 < Lx; ++x1)
    for (int x2 = 0; x2 < Ly; ++x2) {
      const Parity parity = vertex_parity(x1, x2);
      std::vector<std::string> links;
      if (gauged) links = {site_label("s", x1, x2), site_label("t", x1, x2)};
      append_block(s, vertex_modes(parity, x1, x2), links, vertex_block(p, parity, variant, gauged));
      for (const char* sgn : {"+", "-"}) {
        const std::string pm(sgn);
        // vertical bond below, horizontal bond on the left
        if (x2 > 0) pair_off(s, site_label("u" + pm, x1, x2 - 1), site_label("d" + pm, x1, x2));
        else if (!torus) empty_off(s, site_label("d" + pm, x1, x2));
        if (x1 > 0) pair_off(s, site_label("l" + pm, x1, x2), site_label("r" + pm, x1 - 1, x2));
        if (x1 == Lx - 1) pair_off(s, site_label("l" + pm, 0, x2), site_label("r" + pm, x1, x2));
        if (x2 == Ly - 1) {
          if (torus) pair_off(s, site_label("u" + pm, x1, x2), site_label("d" + pm, x1, 0));
          else empty_off(s, site_label("u" + pm, x1, x2));
        }
      }
      s.prune();
    }
  // matter modes, column-major so far, into row-major order
  std::vector<int> order;
  for (int x2 = 0; x2 < Ly; ++x2)
    for (int x1 = 0; x1 < Lx; ++x1) order.push_back(s.mode(site_label("psi", x1, x2)));
  reorder_modes(s, order);
  return s;
}

int level_of(const FockState& s, const FockKey& k, const std::string& label) {
  return link_level(k.b, s.link(label));
}

}  // namespace

std::string site_label(const std::string& name, int x1, int x2) {
  return name + "@" + std::to_string(x1) + "," + std::to_string(x2);
}

FockState exact_fiducial(const TMatrix& tm, bool gauged) {
  PepsParameters p;
  // Recover the parameters from the T matrix entries.
  p.t = std::abs(tm.entries(0, 0));
  p.y = tm.entries(1, 1);
  p.z = tm.entries(1, 2) * std::sqrt(2.0);
  FockState s = FockState::vacuum();
  std::vector<std::string> modes(fiducial_mode_order(tm.parity).begin(), fiducial_mode_order(tm.parity).end());
  std::vector<std::string> links;
  if (gauged) links = {"s", "t"};
  append_block(s, modes, links, vertex_block(p, tm.parity, AbVariant::Exact, gauged));
  return s;
}

FockState exact_gauged_state(const PepsParameters& p, int Lx, int Ly, const OracleOptions& opt) {
  return contract(p, Lx, Ly, opt.torus, opt.variant, true, opt.cap);
}

FockState exact_global_state(const PepsParameters& p, int Lx, int Ly, std::size_t cap) {
  if (!(p.t > 0)) throw ParameterError("t must be positive");
  return contract(p, Lx, Ly, true, AbVariant::Exact, false, cap);
}

int gauss_charge(const FockState& s, const FockKey& k, int Lx, int Ly, bool torus, int x1, int x2) {
  int g = level_of(s, k, site_label("s", x1, x2)) + level_of(s, k, site_label("t", x1, x2));
  g -= level_of(s, k, site_label("s", (x1 + Lx - 1) % Lx, x2));
  if (x2 > 0 || torus) g -= level_of(s, k, site_label("t", x1, (x2 + Ly - 1) % Ly));
  const int n = static_cast<int>(k.f >> (x2 * Lx + x1) & 1u);
  return g - vertex_sign(x1, x2) * n;
}

double gauss_violation(const FockState& s, int Lx, int Ly, bool torus) {
  const double norm = std::sqrt(s.norm2());
  double worst = 0;
  for (int x1 = 0; x1 < Lx; ++x1)
    for (int x2 = 0; x2 < Ly; ++x2)
      for (double phi : {0.7, 1.9}) {
        double acc = 0;
        for (auto& [k, v] : s.amp) acc += std::norm((std::polar(1.0, phi * gauss_charge(s, k, Lx, Ly, torus, x1, x2)) - 1.0) * v);
        worst = std::max(worst, std::sqrt(acc) / norm);
      }
  return worst;
}

double verify_gauss_law(const PepsParameters& p, int Lx, int Ly, const OracleOptions& opt) {
  if (Lx * Ly > 9) throw ResourceError("oracle lattice above 3 x 3", Lx * Ly);
  return gauss_violation(exact_gauged_state(p, Lx, Ly, opt), Lx, Ly, opt.torus);
}

FockState apply_spec(const FockState& s, int Lx, const ObservableSpec& spec) {
  FockState r = s;
  const LinkSpace& ls = LinkSpace::get();
  for (auto it = spec.path.rbegin(); it != spec.path.rend(); ++it) {
    const PathElement& e = *it;
    const int x1 = ((e.x1 % Lx) + Lx) % Lx;
    if (e.slot == Slot::Psi) {
      const int mode = e.x2 * Lx + x1;
      if (e.tag == OpTag::Create) r = apply_fermion(r, mode, true);
      else if (e.tag == OpTag::Annihilate) r = apply_fermion(r, mode, false);
      else if (e.tag == OpTag::Number) r = apply_fermion(apply_fermion(r, mode, false), mode, true);
      else throw ParameterError("link tag on the matter slot");
      continue;
    }
    Eigen::Matrix3cd m;
    switch (e.tag) {
      case OpTag::SigmaPlus: m = ls.SigmaPlus.cast<cd>(); break;
      case OpTag::SigmaMinus: m = ls.SigmaMinus.cast<cd>(); break;
      case OpTag::Sigma: m = ls.Sigma.cast<cd>(); break;
      case OpTag::Phase: m = LinkSpace::phase(e.q); break;
      default: throw ParameterError("matter tag on a link slot");
    }
    r = apply_link(r, r.link(site_label(e.slot == Slot::S ? "s" : "t", x1, e.x2)), m);
  }
  return r;
}

cd oracle_expectation(const FockState& s, int Lx, const ObservableSpec& spec) {
  return inner(s, apply_spec(s, Lx, spec)) / s.norm2();
}

cd oracle_hopping(const FockState& s, int a, int b) {
  return inner(s, apply_fermion(apply_fermion(s, b, false), a, true)) / s.norm2();
}

cd oracle_pairing(const FockState& s, int a, int b) {
  return inner(s, apply_fermion(apply_fermion(s, b, true), a, true)) / s.norm2();
}

std::array<cd, 3> horizontal_ring_amplitudes(const PepsParameters& p, int L1) {
  const FockState s = exact_gauged_state(p, L1, 1);
  std::array<cd, 3> out{};
  for (int i = 0; i < 3; ++i) {
    const int level = i == 0 ? 0 : (i == 1 ? 1 : -1);
    FockKey k;
    for (int x = 0; x < L1; ++x) {
      k.b = with_link_level(k.b, s.link(site_label("s", x, 0)), level);
      k.b = with_link_level(k.b, s.link(site_label("t", x, 0)), 0);
    }
    auto it = s.amp.find(k);
    out[i] = it == s.amp.end() ? cd(0.0) : it->second;
  }
  return out;
}

}  // namespace gp

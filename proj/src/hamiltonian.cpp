#include <cmath>

#include "gp/fpeps.hpp"

namespace gp {

namespace {

int fold(int x, int l) {
  x %= l;
  if (x < 0) x += l;
  return x > l / 2 ? x - l : x;
}

// (1/N) sum_k e^{i k x} f(k) for every displacement x on the L1 x L2 torus.
template <class F>
std::vector<cd> inverse_transform(int l1, int l2, F&& f, double shift = 0.0) {
  std::vector<cd> fk(static_cast<size_t>(l1) * l2);
  for (int a = 0; a < l1; ++a)
    for (int b = 0; b < l2; ++b) fk[a * l2 + b] = f(a, b);
  std::vector<cd> out(fk.size(), 0.0);
  const double norm = 1.0 / (l1 * l2);
  for (int x1 = 0; x1 < l1; ++x1)
    for (int x2 = 0; x2 < l2; ++x2) {
      cd acc = 0;
      for (int a = 0; a < l1; ++a)
        for (int b = 0; b < l2; ++b)
          acc += std::polar(1.0, 2 * M_PI * ((a + shift) * x1 / l1 + (b + shift) * x2 / l2)) * fk[a * l2 + b];
      out[x1 * l2 + x2] = acc * norm;
    }
  return out;
}

}  // namespace

ParentHamiltonianCoeffs parent_hamiltonian(const PepsParameters& p, double drop) {
  if (p.L1 < 8 || p.L2 < 8) throw GeometryError("parent Hamiltonian needs L1, L2 >= 8");
  std::vector<cd> r0(static_cast<size_t>(p.L1) * p.L2), d0(r0.size());
  for (int a = 0; a < p.L1; ++a)
    for (int b = 0; b < p.L2; ++b) {
      auto [al, be] = alpha_beta(p, 2 * M_PI * a / p.L1, 2 * M_PI * b / p.L2);
      r0[a * p.L2 + b] = std::norm(al) - std::norm(be);
      d0[a * p.L2 + b] = 2.0 * std::conj(al) * be;
    }
  auto rx = inverse_transform(p.L1, p.L2, [&](int a, int b) { return r0[a * p.L2 + b]; });
  auto dx = inverse_transform(p.L1, p.L2, [&](int a, int b) { return d0[a * p.L2 + b]; });
  ParentHamiltonianCoeffs h;
  for (int x1 = 0; x1 < p.L1; ++x1)
    for (int x2 = 0; x2 < p.L2; ++x2) {
      const auto key = std::make_pair(fold(x1, p.L1), fold(x2, p.L2));
      const cd r = rx[x1 * p.L2 + x2], d = dx[x1 * p.L2 + x2];
      if (std::abs(r) > drop) h.hopping[key] = r.real();
      if (std::abs(d) > drop) h.pairing[key] = d;
    }
  return h;
}

Correlators correlators(const PepsParameters& p, bool antiperiodic) {
  BcsState s = bcs_state(p, antiperiodic);
  const double shift = antiperiodic ? 0.5 : 0.0;
  auto rx = inverse_transform(p.L1, p.L2, [&](int a, int b) { return cd(s.grid[a * p.L2 + b].R); }, shift);
  auto dx = inverse_transform(p.L1, p.L2, [&](int a, int b) {
    const MomentumBlock& m = s.grid[a * p.L2 + b];
    return cd(m.P, -m.I);
  }, shift);
  Correlators c;
  for (int x1 = 0; x1 < p.L1; ++x1)
    for (int x2 = 0; x2 < p.L2; ++x2) {
      const auto key = std::make_pair(fold(x1, p.L1), fold(x2, p.L2));
      const double delta = (x1 == 0 && x2 == 0) ? 1.0 : 0.0;
      c.hopping[key] = 0.5 * (delta - rx[x1 * p.L2 + x2]);
      // P - iI transforms into <psi psi>; conjugate for <psi^dag psi^dag>
      c.pairing[key] = 0.5 * std::conj(dx[x1 * p.L2 + x2]);
    }
  return c;
}

std::map<std::pair<int, int>, cd> pairing_function(const PepsParameters& p, bool antiperiodic) {
  const double shift = antiperiodic ? 0.5 : 0.0;
  auto gx = inverse_transform(p.L1, p.L2, [&](int a, int b) {
    auto [al, be] = alpha_beta(p, 2 * M_PI * (a + shift) / p.L1, 2 * M_PI * (b + shift) / p.L2);
    if (std::abs(al) < 1e-300) throw SingularChannelError("alpha vanishes on the grid", 0.0);
    return be / al;
  }, shift);
  std::map<std::pair<int, int>, cd> g;
  for (int x1 = 0; x1 < p.L1; ++x1)
    for (int x2 = 0; x2 < p.L2; ++x2) g[{fold(x1, p.L1), fold(x2, p.L2)}] = gx[x1 * p.L2 + x2];
  return g;
}

}  // namespace gp

#pragma once

#include <array>
#include <string>

#include "gp/fock.hpp"
#include "gp/gauge.hpp"
#include "gp/observable_spec.hpp"

namespace gp {

// Brute-force states on tiny lattices.  Vertices are contracted column by
// column; the surviving matter modes are finally ordered row-major
// (index x2 * Lx + x1), links are labelled "s@x1,x2" and "t@x1,x2".
struct OracleOptions {
  bool torus = false;  // periodic in x2 as well
  AbVariant variant = AbVariant::Exact;
  std::size_t cap = std::size_t(1) << 24;
};

std::string site_label(const std::string& name, int x1, int x2);

// One vertex: nine fermion modes in fiducial order, plus s and t if gauged.
FockState exact_fiducial(const TMatrix& tm, bool gauged);

// The gauged state on an Lx x Ly cylinder (periodic x1; d of the bottom and
// u of the top row projected on the vacuum) or torus.
FockState exact_gauged_state(const PepsParameters& p, int Lx, int Ly, const OracleOptions& opt = {});

// The Gaussian fermionic PEPS on an Lx x Ly torus (no gauge field).
FockState exact_global_state(const PepsParameters& p, int Lx, int Ly, std::size_t cap = std::size_t(1) << 24);

// max over vertices and phi in {0.7, 1.9} of |exp(i phi G_x) psi - psi| / |psi|
// with G_x = E_s(x) + E_t(x) - E_s(x - e1) - E_t(x - e2) - s_x n(x).
double gauss_violation(const FockState& s, int Lx, int Ly, bool torus);
double verify_gauss_law(const PepsParameters& p, int Lx, int Ly, const OracleOptions& opt = {});

// Gauss-law charge G_x of one basis state (used by the operator checks).
int gauss_charge(const FockState& s, const FockKey& key, int Lx, int Ly, bool torus, int x1, int x2);

// O |psi> with the elements applied right to left.
FockState apply_spec(const FockState& s, int Lx, const ObservableSpec& spec);
// <psi|O|psi> / <psi|psi>
cd oracle_expectation(const FockState& s, int Lx, const ObservableSpec& spec);

// <psi^dag_a psi_b> and <psi^dag_a psi^dag_b> between matter modes.
cd oracle_hopping(const FockState& s, int a, int b);
cd oracle_pairing(const FockState& s, int a, int b);

// Amplitudes of the horizontal ring state (t = 0, z = 0 after projecting the
// vertical modes on the vacuum) on uniform side-link levels 0, +1, -1.
std::array<cd, 3> horizontal_ring_amplitudes(const PepsParameters& p, int L1);

}  // namespace gp

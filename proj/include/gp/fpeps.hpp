#pragma once

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gp/gaussian.hpp"

namespace gp {

enum class Parity { Even, Odd };

struct PepsParameters {
  double t = 1.0;
  cd y = 0.0;
  cd z = 0.0;
  int L1 = 4;
  int L2 = 4;
};

// Rows: psi followed by the four modes on the psi side; columns: the other
// four modes.  Even vertex: rows {psi, l+, r-, u-, d+}, cols {l-, r+, u+, d-}.
// Odd vertex: rows {psi, l-, r+, u+, d-}, cols {l+, r-, u-, d+}.
struct TMatrix {
  Eigen::Matrix<cd, 5, 4> entries;
  Parity parity = Parity::Even;

  Eigen::Matrix4cd tau() const { return entries.bottomRows<4>(); }
};

// Throws ParameterError for t <= 0 unless allow_zero_t (gauged, pure gauge).
TMatrix build_t_matrix(const PepsParameters& p, Parity parity = Parity::Even,
                       bool allow_zero_t = false);

// Fiducial mode labels in channel order, 0 = psi.
const std::array<std::string, 9>& fiducial_mode_order(Parity parity);

// Position in fiducial_mode_order of T's row i (0..4) and column j (0..3).
int t_row_mode(int i);
int t_col_mode(int j);

// Antisymmetric Z with A|0> = exp(1/2 a^dag Z a^dag)|0> in fiducial order.
MatC fiducial_pairing(const TMatrix& tm);

// 18x18 Majorana covariance of the normalised fiducial state.
MajoranaCovariance fiducial_state_covariance(const TMatrix& tm);
ChannelBlocks fiducial_covariance(const TMatrix& tm);

// Fourier-transformed bond covariance on the 16 virtual Majoranas.
MatC bond_covariance(double k1, double k2);

struct MomentumBlock {
  double k1 = 0, k2 = 0;
  double P = 0, R = 1, I = 0;
  double P0 = 0, R0 = 0, I0 = 0;
  double Dnorm = 0;
  cd alpha = 0, beta = 0;
};

// Channel route.  P0, R0, I0 = Dnorm * (P, R, I) with Dnorm = |det(D - G_in)|.
// At the four unpaired momenta the channel is singular and the vacuum block
// (R = 1) is returned instead.
MomentumBlock momentum_block(const PepsParameters& p, double k1, double k2);

// Closed-form BCS amplitudes.
std::pair<cd, cd> alpha_beta(const PepsParameters& p, double k1, double k2);

// The same amplitudes from the determinant identity: alpha = F(S,S,tau,tau),
// beta = linear coefficient in X of F(S_X, S, T, T).
std::pair<cd, cd> alpha_beta_from_F(const PepsParameters& p, double k1, double k2);

// Bond pairing matrix S(k) of the momentum-space construction.
Eigen::Matrix4cd bond_pairing(double k1, double k2);

// alpha-tilde at (0,0), (pi,pi), (pi,0), (0,pi).
std::array<cd, 4> unpaired_amplitudes(const PepsParameters& p);
const std::array<std::pair<double, double>, 4>& unpaired_momenta();
bool is_unpaired(double k1, double k2, double tol = 1e-12);

// E(k) = |alpha|^2 + |beta|^2
double dispersion(const PepsParameters& p, double k1, double k2);

struct BcsState {
  std::vector<MomentumBlock> grid;  // n1 * L2 + n2, k = 2 pi (n + shift) / L
  std::array<cd, 4> unpaired;
};

// Channel data on the discrete zone; unpaired momenta are set to the vacuum
// (R = 1, P = I = 0) without going through the channel.
// `antiperiodic` shifts the grid by half a step in both directions.
BcsState bcs_state(const PepsParameters& p, bool antiperiodic = false);

enum class PhaseLabel { Gapped, A, B, C, D, E };
std::string to_string(PhaseLabel l);

PhaseLabel classify_phase(cd y, cd z, double tol = 1e-9);

// Plaquette sum of the upper-band Berry flux of R0 sz + I0 sy + P0 sx on an
// n x n grid shifted by half a step, so the four band-touching momenta sit
// inside plaquettes and never on a corner.
int chern_number(const PepsParameters& p, int n = 64);

struct ParentHamiltonianCoeffs {
  std::map<std::pair<int, int>, double> hopping;
  std::map<std::pair<int, int>, cd> pairing;
};

// Inverse FFT of R0 and P0 - i I0 on the L1 x L2 grid; entries below
// `drop` are omitted.  Displacements are folded into (-L/2, L/2].
ParentHamiltonianCoeffs parent_hamiltonian(const PepsParameters& p, double drop = 1e-12);

struct Correlators {
  std::map<std::pair<int, int>, cd> hopping;  // <psi_x^dag psi_{x+d}>
  std::map<std::pair<int, int>, cd> pairing;  // <psi_x^dag psi_{x+d}^dag>
};

Correlators correlators(const PepsParameters& p, bool antiperiodic = false);

// Real-space pairing function: inverse FFT of beta / alpha.
std::map<std::pair<int, int>, cd> pairing_function(const PepsParameters& p, bool antiperiodic = false);

}  // namespace gp

#include "gp/fpeps.hpp"

#include <cmath>

namespace gp {

namespace {

constexpr int kRowMode[5] = {0, 1, 2, 5, 6};
constexpr int kColMode[4] = {3, 4, 7, 8};

}  // namespace

int t_row_mode(int i) { return kRowMode[i]; }
int t_col_mode(int j) { return kColMode[j]; }

const std::array<std::string, 9>& fiducial_mode_order(Parity parity) {
  static const std::array<std::string, 9> even = {"psi", "l+", "r-", "l-", "r+", "u-", "d+", "u+", "d-"};
  static const std::array<std::string, 9> odd = {"psi", "l-", "r+", "l+", "r-", "u+", "d-", "u-", "d+"};
  return parity == Parity::Even ? even : odd;
}

TMatrix build_t_matrix(const PepsParameters& p, Parity parity, bool allow_zero_t) {
  if (!(p.t > 0) && !(allow_zero_t && p.t == 0))
    throw ParameterError("t must be positive");
  const cd eta = std::polar(1.0, M_PI / 4);
  const cd y = p.y, zs = p.z / std::sqrt(2.0);
  TMatrix tm;
  tm.parity = parity;
  tm.entries << p.t, eta * eta * p.t, eta * p.t, eta * eta * eta * p.t,
      0.0, y, zs, zs,
      -y, 0.0, -zs, zs,
      -zs, zs, 0.0, y,
      -zs, -zs, -y, 0.0;
  return tm;
}

MatC fiducial_pairing(const TMatrix& tm) {
  MatC z = MatC::Zero(9, 9);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 4; ++j) {
      z(kRowMode[i], kColMode[j]) = tm.entries(i, j);
      z(kColMode[j], kRowMode[i]) = -tm.entries(i, j);
    }
  return z;
}

MajoranaCovariance fiducial_state_covariance(const TMatrix& tm) {
  auto [rho, kappa] = pairing_state_correlations(fiducial_pairing(tm));
  const auto& names = fiducial_mode_order(tm.parity);
  return {majorana_from_dirac(rho, kappa), std::vector<std::string>(names.begin(), names.end())};
}

ChannelBlocks fiducial_covariance(const TMatrix& tm) {
  MatR m = fiducial_state_covariance(tm).matrix;
  return {m.topLeftCorner(2, 2), m.topRightCorner(2, 16), m.bottomRightCorner(16, 16)};
}

MatC bond_covariance(double k1, double k2) {
  MatC g = MatC::Zero(16, 16);
  Eigen::Matrix2cd sx;
  sx << 0, 1, 1, 0;
  auto block = [&](int off, double k) {
    const cd e = std::polar(1.0, k);
    for (int pair = 0; pair < 2; ++pair) {
      int a = off + 4 * pair, b = a + 2;
      g.block(a, b, 2, 2) = sx * e;
      g.block(b, a, 2, 2) = -sx * std::conj(e);
    }
  };
  block(0, k1);
  block(8, -k2);
  return g;
}

MomentumBlock momentum_block(const PepsParameters& p, double k1, double k2) {
  ChannelBlocks blocks = fiducial_covariance(build_t_matrix(p));
  if (is_unpaired(k1, k2)) {
    // D - G_in has a zero mode here; the mode stays in the vacuum.  Dnorm
    // is continued from a nearby momentum with the same D/E ratio.
    MomentumBlock mb;
    mb.k1 = k1;
    mb.k2 = k2;
    std::tie(mb.alpha, mb.beta) = alpha_beta(p, k1, k2);
    const double q1 = k1 + 0.61, q2 = k2 + 0.37;
    const double ratio = std::abs(channel_determinant(blocks, bond_covariance(q1, q2))) / dispersion(p, q1, q2);
    mb.Dnorm = ratio * dispersion(p, k1, k2);
    mb.R0 = mb.Dnorm;
    return mb;
  }
  MatC gin = bond_covariance(k1, k2);
  MatC g;
  try {
    g = gaussian_channel(blocks, gin);
  } catch (SingularChannelError& e) {
    e.k1 = k1;
    e.k2 = k2;
    throw;
  }
  MomentumBlock mb;
  mb.k1 = k1;
  mb.k2 = k2;
  mb.P = g(0, 0).imag();
  mb.R = g(0, 1).real();
  mb.I = g(0, 1).imag();
  mb.Dnorm = std::abs(channel_determinant(blocks, gin));
  mb.P0 = mb.Dnorm * mb.P;
  mb.R0 = mb.Dnorm * mb.R;
  mb.I0 = mb.Dnorm * mb.I;
  std::tie(mb.alpha, mb.beta) = alpha_beta(p, k1, k2);
  return mb;
}

}  // namespace gp

#include <cmath>

#include "gp/fpeps.hpp"

namespace gp {

namespace {

struct Coefficients {
  cd A0, A1, A2, A3, B1, B2, B2s;
};

Coefficients coefficients(cd y, cd z) {
  const cd i(0, 1);
  const cd y2 = y * y, z2 = z * z, y4 = y2 * y2, z4 = z2 * z2;
  Coefficients c;
  c.A0 = (1.0 + y4) * (1.0 + y4) - 4.0 * y4 * y2 * z2 + 3.0 * (1.0 + 2.0 * y4) * z4 -
         4.0 * y2 * z4 * z2 + z4 * z4;
  c.A1 = -2.0 * z2 * (1.0 + y4 + z4 - 2.0 * y2 * (1.0 + z2));
  c.A2 = 4.0 * y4 * z2 - 2.0 * y2 * (z4 + 1.0) + z4 - 2.0 * y4 * y2;
  c.A3 = 0.5 * (z2 - 2.0 * y2) * (z2 - 2.0 * y2);
  c.B1 = (1.0 + z2) * (1.0 + z4 - 2.0 * y * z2 * z) + y2 * (1.0 + 2.0 * z2 - z4) +
         2.0 * z * y2 * y * (2.0 * z2 - 1.0) - y4 * (z2 - 1.0) + y4 * y * (y - 2.0 * z);
  const cd re = y * (z - y) * (1.0 + y2 - z2);
  const cd im = 0.5 * z * (-2.0 * y + 2.0 * y2 * y + z - 3.0 * y2 * z + z2 * z);
  c.B2 = re + i * im;
  c.B2s = re - i * im;
  return c;
}

}  // namespace

std::pair<cd, cd> alpha_beta(const PepsParameters& p, double k1, double k2) {
  const Coefficients c = coefficients(p.y, p.z);
  const cd i(0, 1);
  using std::cos;
  using std::sin;
  cd alpha = c.A0 + c.A1 * (cos(k1 + k2) + cos(k1 - k2)) + c.A2 * (cos(2 * k1) + cos(2 * k2)) +
             c.A3 * (cos(2 * k1 + 2 * k2) + cos(2 * k1 - 2 * k2));
  const double tt = 2 * p.t * p.t;
  cd beta = tt * c.B1 * (sin(k1) - i * sin(k2)) +
            tt * c.B2 * (sin(k1 + 2 * k2) - i * sin(k2 - 2 * k1)) -
            tt * c.B2s * (sin(2 * k2 - k1) + i * sin(k2 + 2 * k1));
  return {alpha, beta};
}

Eigen::Matrix4cd bond_pairing(double k1, double k2) {
  Eigen::Matrix4cd s = Eigen::Matrix4cd::Zero();
  s(0, 1) = -std::polar(1.0, -k1);
  s(1, 0) = std::polar(1.0, k1);
  s(2, 3) = -std::polar(1.0, -k2);
  s(3, 2) = std::polar(1.0, k2);
  return s;
}

std::pair<cd, cd> alpha_beta_from_F(const PepsParameters& p, double k1, double k2) {
  const TMatrix tm = build_t_matrix(p);
  // The vertical momentum of S runs opposite to the bond covariance.
  const MatC s = bond_pairing(k1, -k2);
  const MatC tau = tm.tau();
  cd alpha = det_identity_F(s, s, tau, tau);
  // F(S_X, S, T, T) = det(S_X T S T^T + 1) is affine in X.
  const MatC t = tm.entries;
  auto f = [&](double x) {
    MatC sx = MatC::Zero(5, 5);
    sx(0, 0) = -x;
    sx.bottomRightCorner(4, 4) = s;
    return (sx * t * s * t.transpose() + MatC::Identity(5, 5)).determinant();
  };
  return {alpha, f(1.0) - f(0.0)};
}

const std::array<std::pair<double, double>, 4>& unpaired_momenta() {
  static const std::array<std::pair<double, double>, 4> k = {
      {{0.0, 0.0}, {M_PI, M_PI}, {M_PI, 0.0}, {0.0, M_PI}}};
  return k;
}

bool is_unpaired(double k1, double k2, double tol) {
  auto on = [tol](double k) {
    double r = std::remainder(k, M_PI);
    return std::abs(r) < tol;
  };
  return on(k1) && on(k2);
}

std::array<cd, 4> unpaired_amplitudes(const PepsParameters& p) {
  const cd y = p.y, z = p.z;
  const cd a0 = (1.0 - (y + z) * (y + z)) * (1.0 - (y - z) * (y - z));
  const cd h = 1.0 - y * y + z * z;
  const cd api = h * h;
  return {a0, a0, api, api};
}

double dispersion(const PepsParameters& p, double k1, double k2) {
  auto [a, b] = alpha_beta(p, k1, k2);
  return std::norm(a) + std::norm(b);
}

BcsState bcs_state(const PepsParameters& p, bool antiperiodic) {
  const double shift = antiperiodic ? 0.5 : 0.0;
  BcsState s;
  s.unpaired = unpaired_amplitudes(p);
  s.grid.reserve(static_cast<size_t>(p.L1) * p.L2);
  for (int n1 = 0; n1 < p.L1; ++n1)
    for (int n2 = 0; n2 < p.L2; ++n2) {
      const double k1 = 2 * M_PI * (n1 + shift) / p.L1, k2 = 2 * M_PI * (n2 + shift) / p.L2;
      if (is_unpaired(k1, k2)) {
        MomentumBlock mb;
        mb.k1 = k1;
        mb.k2 = k2;
        std::tie(mb.alpha, mb.beta) = alpha_beta(p, k1, k2);
        s.grid.push_back(mb);
      } else {
        s.grid.push_back(momentum_block(p, k1, k2));
      }
    }
  return s;
}

}  // namespace gp

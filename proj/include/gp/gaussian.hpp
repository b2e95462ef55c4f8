#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gp/errors.hpp"

namespace gp {

using cd = std::complex<double>;
using MatR = Eigen::MatrixXd;
using MatC = Eigen::MatrixXcd;
using VecR = Eigen::VectorXd;
using VecC = Eigen::VectorXcd;

// Real antisymmetric covariance Gamma_lm = (i/2)<[c_l, c_m]>, with
// c_{2j} = a_j + a_j^dag and c_{2j+1} = i(a_j - a_j^dag).
struct MajoranaCovariance {
  MatR matrix;
  std::vector<std::string> mode_order;

  int modes() const { return static_cast<int>(matrix.rows() / 2); }
  bool is_pure(double tol = 1e-10) const;
  bool is_physical(double tol = 1e-10) const;
};

// M = [[A, B], [-B^T, D]] split into physical and virtual Majoranas.
struct ChannelBlocks {
  MatR A, B, D;
  MatR assembled() const;
};

// Dirac picture: Q_kl = (i/2)<[a_k, a_l]>, R_kl = (i/2)<[a_k, a_l^dag]>.
struct DiracCovarianceBlocks {
  MatC R, Q;
  // [[conj R, conj Q], [Q, R]]
  MatC assembled() const;
  bool is_pure(double tol = 1e-10) const;
};

template <class Derived>
void check_antisymmetric(const Eigen::MatrixBase<Derived>& m, double tol = 1e-12) {
  if (m.rows() != m.cols()) throw ShapeError("matrix is not square");
  if (m.rows() % 2 != 0) throw DimensionError("odd dimension");
  double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m + m.transpose()).cwiseAbs().maxCoeff() > tol * scale)
    throw ShapeError("matrix is not antisymmetric");
}

// Parlett-Reid tridiagonalisation with partial pivoting.
template <class Derived>
typename Derived::Scalar pfaffian(const Eigen::MatrixBase<Derived>& m, double tol = 1e-12) {
  using S = typename Derived::Scalar;
  check_antisymmetric(m, tol);
  Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> a = m;
  const Eigen::Index n = a.rows();
  S pf = S(1);
  for (Eigen::Index k = 0; k + 1 < n; k += 2) {
    Eigen::Index kp;
    a.col(k).tail(n - k - 1).cwiseAbs().maxCoeff(&kp);
    kp += k + 1;
    if (kp != k + 1) {
      a.row(k + 1).swap(a.row(kp));
      a.col(k + 1).swap(a.col(kp));
      pf = -pf;
    }
    if (a(k + 1, k) == S(0)) return S(0);
    pf *= a(k, k + 1);
    if (k + 2 < n) {
      const Eigen::Index r = n - k - 2;
      Eigen::Matrix<S, Eigen::Dynamic, 1> tau = a.row(k).tail(r).transpose() / a(k, k + 1);
      Eigen::Matrix<S, Eigen::Dynamic, 1> col = a.col(k + 1).tail(r);
      a.bottomRightCorner(r, r) += tau * col.transpose() - col * tau.transpose();
    }
  }
  return pf;
}

// G_out = A + B (D - G_in)^{-1} B^T.  Throws SingularChannelError when the
// condition number of (D - G_in) exceeds `max_condition`.
MatC gaussian_channel(const ChannelBlocks& blocks, const MatC& g_in,
                      double max_condition = 1e12);
MatR gaussian_channel(const ChannelBlocks& blocks, const MatR& g_in,
                      double max_condition = 1e12);

// det(D - G_in)
cd channel_determinant(const ChannelBlocks& blocks, const MatC& g_in);

// det(A D B C^T + 1)
cd det_identity_F(const MatC& a, const MatC& b, const MatC& c, const MatC& d);

// Majorana covariance from <a_i^dag a_j> and <a_i a_j>.
MatR majorana_from_dirac(const MatC& rho, const MatC& kappa);

// Correlations of the normalised state exp(1/2 sum Z_ij a_i^dag a_j^dag)|0>,
// Z antisymmetric.  Returns (rho, kappa).
std::pair<MatC, MatC> pairing_state_correlations(const MatC& z);

DiracCovarianceBlocks dirac_blocks(const MatR& gamma);

// Unitary W with c = W f, f = (a_1..a_n, a_1^dag..a_n^dag).
MatC majorana_transform(int n);

}  // namespace gp

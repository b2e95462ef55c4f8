#include "gp/gaussian.hpp"

#include <limits>

#include <Eigen/SVD>

namespace gp {

bool MajoranaCovariance::is_pure(double tol) const {
  const auto n = matrix.rows();
  return (matrix * matrix + MatR::Identity(n, n)).cwiseAbs().maxCoeff() < tol;
}

bool MajoranaCovariance::is_physical(double tol) const {
  Eigen::JacobiSVD<MatR> svd(matrix);
  return svd.singularValues().maxCoeff() <= 1.0 + tol;
}

MatR ChannelBlocks::assembled() const {
  const auto p = A.rows(), v = D.rows();
  MatR m(p + v, p + v);
  m << A, B, -B.transpose(), D;
  return m;
}

MatC DiracCovarianceBlocks::assembled() const {
  const auto n = R.rows();
  MatC g(2 * n, 2 * n);
  g << R.conjugate(), Q.conjugate(), Q, R;
  return g;
}

bool DiracCovarianceBlocks::is_pure(double tol) const {
  MatC g = assembled();
  const auto n = g.rows();
  return (g * g.adjoint() - 0.25 * MatC::Identity(n, n)).cwiseAbs().maxCoeff() < tol;
}

namespace {

template <class M>
double condition_number(const M& m) {
  Eigen::JacobiSVD<M> svd(m);
  const auto& s = svd.singularValues();
  double smin = s(s.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

template <class M>
M channel_impl(const ChannelBlocks& blocks, const M& g_in, double max_condition) {
  if (g_in.rows() != blocks.D.rows() || g_in.cols() != blocks.D.cols())
    throw ShapeError("G_in does not match the virtual block");
  M dm = blocks.D.template cast<typename M::Scalar>() - g_in;
  double cond = condition_number(dm);
  if (!(cond <= max_condition))
    throw SingularChannelError("D - G_in is singular", cond);
  M bm = blocks.B.template cast<typename M::Scalar>();
  M out = blocks.A.template cast<typename M::Scalar>();
  out += bm * dm.partialPivLu().solve(bm.transpose());
  return out;
}

}  // namespace

MatC gaussian_channel(const ChannelBlocks& blocks, const MatC& g_in, double max_condition) {
  return channel_impl<MatC>(blocks, g_in, max_condition);
}

MatR gaussian_channel(const ChannelBlocks& blocks, const MatR& g_in, double max_condition) {
  return channel_impl<MatR>(blocks, g_in, max_condition);
}

cd channel_determinant(const ChannelBlocks& blocks, const MatC& g_in) {
  if (g_in.rows() != blocks.D.rows() || g_in.cols() != blocks.D.cols())
    throw ShapeError("G_in does not match the virtual block");
  return (blocks.D.cast<cd>() - g_in).determinant();
}

cd det_identity_F(const MatC& a, const MatC& b, const MatC& c, const MatC& d) {
  const auto n = a.rows();
  for (const MatC* m : {&a, &b, &c, &d})
    if (m->rows() != n || m->cols() != n) throw ShapeError("F needs equal square blocks");
  return (a * d * b * c.transpose() + MatC::Identity(n, n)).determinant();
}

MatC majorana_transform(int n) {
  MatC w = MatC::Zero(2 * n, 2 * n);
  const cd i(0, 1);
  for (int j = 0; j < n; ++j) {
    w(2 * j, j) = 1;
    w(2 * j, n + j) = 1;
    w(2 * j + 1, j) = i;
    w(2 * j + 1, n + j) = -i;
  }
  return w;
}

MatR majorana_from_dirac(const MatC& rho, const MatC& kappa) {
  const auto n = rho.rows();
  MatC f(2 * n, 2 * n);
  f.topLeftCorner(n, n) = kappa;
  f.topRightCorner(n, n) = MatC::Identity(n, n) - rho.transpose();
  f.bottomLeftCorner(n, n) = rho;
  f.bottomRightCorner(n, n) = kappa.transpose().conjugate();
  MatC w = majorana_transform(static_cast<int>(n));
  MatC c = w * f * w.transpose();
  MatC g = cd(0, 0.5) * (c - c.transpose());
  return g.real();
}

std::pair<MatC, MatC> pairing_state_correlations(const MatC& z) {
  const auto n = z.rows();
  MatC zz = z * z.adjoint();
  MatC rho_bar = (MatC::Identity(n, n) + zz).partialPivLu().solve(zz);
  MatC rho = rho_bar.conjugate();
  MatC kappa = z * (rho - MatC::Identity(n, n));
  return {rho, kappa};
}

DiracCovarianceBlocks dirac_blocks(const MatR& gamma) {
  const auto n2 = gamma.rows();
  const auto n = n2 / 2;
  MatC c = MatC::Identity(n2, n2) - cd(0, 1) * gamma.cast<cd>();
  MatC winv = majorana_transform(static_cast<int>(n)).inverse();
  MatC f = winv * c * winv.transpose();
  MatC kappa = f.topLeftCorner(n, n);
  MatC aad = f.topRightCorner(n, n);    // <a_k a_l^dag>
  MatC ada = f.bottomLeftCorner(n, n);  // <a_k^dag a_l>
  DiracCovarianceBlocks out;
  out.Q = cd(0, 1) * kappa;
  out.R = cd(0, 0.5) * (aad - ada.transpose());
  return out;
}

}  // namespace gp

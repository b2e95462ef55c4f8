#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>

#include "gp/errors.hpp"
#include "gp/transfer.hpp"

namespace gp {

namespace {

// Ritz pairs of H sorted by decreasing magnitude.
void sorted_ritz(const MatC& H, VecC& values, MatC& vectors) {
  Eigen::ComplexEigenSolver<MatC> es(H);
  const Eigen::Index m = H.rows();
  std::vector<Eigen::Index> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(es.eigenvalues()(a)) > std::abs(es.eigenvalues()(b));
  });
  values.resize(m);
  vectors.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    values(i) = es.eigenvalues()(idx[i]);
    vectors.col(i) = es.eigenvectors().col(idx[i]).normalized();
  }
}

}  // namespace

ArnoldiResult krylov_schur(const LinearMap& op, const VecC& start, int n_eigs, double tol,
                           int max_iter, int krylov_dim) {
  const Eigen::Index n = start.size();
  if (n == 0 || start.norm() == 0.0) throw ParameterError("empty start vector");
  const Eigen::Index m = std::min<Eigen::Index>(std::max(krylov_dim, n_eigs + 4), n);
  MatC V = MatC::Zero(n, m + 1);
  MatC H = MatC::Zero(m + 1, m);
  V.col(0) = start.normalized();
  Eigen::Index k = 0;
  ArnoldiResult res;

  for (int iter = 1; iter <= max_iter; ++iter) {
    Eigen::Index size = m;
    double beta = 0;
    for (Eigen::Index j = k; j < m; ++j) {
      VecC w = op(V.col(j));
      const double wn = w.norm();
      VecC h = V.leftCols(j + 1).adjoint() * w;
      w.noalias() -= V.leftCols(j + 1) * h;
      VecC h2 = V.leftCols(j + 1).adjoint() * w;
      w.noalias() -= V.leftCols(j + 1) * h2;
      H.col(j).head(j + 1) += h + h2;
      beta = w.norm();
      if (beta <= 1e-13 * std::max(wn, 1e-300)) {
        size = j + 1;
        beta = 0;
        break;
      }
      H(j + 1, j) = beta;
      V.col(j + 1) = w / beta;
    }

    const MatC Hm = H.topLeftCorner(size, size);
    VecC values;
    MatC Y;
    sorted_ritz(Hm, values, Y);
    const int want = static_cast<int>(std::min<Eigen::Index>(n_eigs, size));
    const double ref = std::max(std::abs(values(0)), 1e-300);
    double worst = 0;
    for (int i = 0; i < want; ++i) worst = std::max(worst, beta * std::abs(Y(size - 1, i)) / ref);
    res.iterations = iter;
    res.residual = worst;
    if (worst <= tol || beta == 0 || size == n) {
      for (int i = 0; i < want; ++i) {
        res.values.push_back(values(i));
        res.vectors.push_back((V.leftCols(size) * Y.col(i)).normalized());
      }
      return res;
    }

    // Thick restart on the span of the wanted Ritz vectors.  Keep a whole
    // cluster of equal magnitudes together.
    Eigen::Index keep = std::min<Eigen::Index>(std::max<Eigen::Index>(n_eigs + 3, size / 2), size - 1);
    while (keep < size - 1 &&
           std::abs(std::abs(values(keep)) - std::abs(values(keep - 1))) < 1e-10 * ref)
      ++keep;
    const MatC Q = Eigen::HouseholderQR<MatC>(Y.leftCols(keep)).householderQ() *
                   MatC::Identity(size, keep);
    const MatC Vk = V.leftCols(size) * Q;
    const MatC Hk = Q.adjoint() * Hm * Q;
    const VecC f = V.col(size);
    const Eigen::RowVectorXcd b = beta * Q.row(size - 1);
    V.setZero();
    H.setZero();
    V.leftCols(keep) = Vk;
    V.col(keep) = f;
    H.topLeftCorner(keep, keep) = Hk;
    H.row(keep).head(keep) = b;
    k = keep;
  }
  throw ConvergenceError("Arnoldi iteration did not converge", res.residual);
}

namespace {

VecC start_vector(Eigen::Index n) {
  std::mt19937 rng(20240611u);
  std::normal_distribution<double> g;
  VecC v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = cd(g(rng), g(rng));
  return v;
}

}  // namespace

Spectrum dominant_spectrum(const PepsParameters& p, int L1, const SpectrumOptions& opt,
                           const TransferLimits& limits) {
  if (opt.n_eigs < 2) throw ParameterError("at least two eigenvalues are needed for the gap");
  if (!(opt.tol > 0 && opt.tol <= 1e-4)) throw ParameterError("tolerance outside (0, 1e-4]");
  const bool pure_gauge = p.t == 0.0;
  if (opt.flux && !pure_gauge) throw ParameterError("flux sectors are conserved only at t = 0");

  const TransferOperator even = build_transfer(p, L1, 0, std::nullopt, limits);
  const TransferOperator odd = pure_gauge ? even : build_transfer(p, L1, 1, std::nullopt, limits);
  const Pattern pat(L1, 0);

  SectorState s = zero_state(pat);
  const Eigen::Index n = s.data.size();
  Eigen::ArrayXd mask = Eigen::ArrayXd::Ones(n);
  if (pure_gauge) {
    const int f = opt.flux.value_or(0);
    for (Eigen::Index i = 0; i < n; ++i)
      if (sector_flux(pat, i) != std::make_pair(f, f)) mask(i) = 0.0;
  }

  LinearMap op = [&](const VecC& v) {
    s.data = v.array() * mask.cast<cd>();
    SectorState r = even.apply(s);
    if (!pure_gauge) r = odd.apply(r);
    return VecC(r.data.array() * mask.cast<cd>());
  };
  VecC v0 = start_vector(n).array() * mask.cast<cd>();
  ArnoldiResult ar = krylov_schur(op, v0, opt.n_eigs, opt.tol, opt.max_iter, opt.krylov_dim);

  Spectrum sp;
  sp.iterations = ar.iterations;
  sp.residual = ar.residual;
  std::vector<cd> per_row = ar.values;
  if (!pure_gauge)
    for (cd& v : per_row) v = std::sqrt(v);
  sp.lambda1 = per_row.front();
  for (cd v : per_row) sp.eigenvalues.push_back(v / sp.lambda1);
  sp.gap = sp.eigenvalues.size() > 1 ? 1.0 - std::abs(sp.eigenvalues[1]) : 1.0;
  return sp;
}

}  // namespace gp

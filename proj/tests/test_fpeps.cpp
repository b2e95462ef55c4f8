#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <numeric>

#include "fock_dense.hpp"
#include "gp/fpeps.hpp"

using namespace gp;
using namespace testutil;

namespace {

const double kSqrt2 = std::sqrt(2.0);

PepsParameters params(double t, cd y, cd z, int l1 = 4, int l2 = 4) {
  PepsParameters p;
  p.t = t;
  p.y = y;
  p.z = z;
  p.L1 = l1;
  p.L2 = l2;
  return p;
}

PepsParameters random_params(std::mt19937& rng, bool complex = false) {
  std::uniform_real_distribution<double> u(-3, 3), ut(0.1, 1.5);
  cd y = u(rng), z = u(rng);
  if (complex) {
    y += cd(0, u(rng) / 3);
    z += cd(0, u(rng) / 3);
  }
  return params(ut(rng), y, z);
}

int index_of(Parity par, const std::string& name) {
  const auto& order = fiducial_mode_order(par);
  return static_cast<int>(std::find(order.begin(), order.end(), name) - order.begin());
}

}  // namespace

TEST_CASE("T matrix closed form") {
  TMatrix tm = build_t_matrix(params(1, 0, 0));
  const cd i(0, 1);
  CHECK(std::abs(tm.entries(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(tm.entries(0, 1) - i) < 1e-15);
  CHECK(std::abs(tm.entries(0, 2) - std::polar(1.0, M_PI / 4)) < 1e-15);
  CHECK(std::abs(tm.entries(0, 3) - std::polar(1.0, 3 * M_PI / 4)) < 1e-15);
  CHECK(tm.tau().cwiseAbs().maxCoeff() == 0.0);

  std::mt19937 rng(1);
  for (int r = 0; r < 5; ++r) {
    Eigen::Matrix4cd tau = build_t_matrix(random_params(rng, true)).tau();
    CHECK((tau + tau.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
  TMatrix magic = build_t_matrix(params(1, 1, kSqrt2));
  CHECK(std::abs(magic.entries(1, 2) - 1.0) < 1e-15);
  CHECK(std::abs(magic.entries(4, 1) + 1.0) < 1e-15);

  CHECK_THROWS_AS(build_t_matrix(params(0, 1, 1)), ParameterError);
  CHECK_THROWS_AS(build_t_matrix(params(-1, 1, 1)), ParameterError);
  CHECK_NOTHROW(build_t_matrix(params(0, 1, 1), Parity::Even, true));
}

// Direct expansion of exp(sum T_ij a_i^dag b_j^dag)|0> over named modes.
TEST_CASE("fiducial covariance matches the Fock construction") {
  std::mt19937 rng(2);
  const char* even_rows[5] = {"psi", "l+", "r-", "u-", "d+"};
  const char* even_cols[4] = {"l-", "r+", "u+", "d-"};
  const char* odd_rows[5] = {"psi", "l-", "r+", "u+", "d-"};
  const char* odd_cols[4] = {"l+", "r-", "u-", "d+"};
  for (Parity par : {Parity::Even, Parity::Odd})
    for (int rep = 0; rep < 3; ++rep) {
      PepsParameters p = random_params(rng, true);
      TMatrix tm = build_t_matrix(p, par);
      const char** rows = par == Parity::Even ? even_rows : odd_rows;
      const char** cols = par == Parity::Even ? even_cols : odd_cols;
      SpC x(512, 512);
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 4; ++j)
          x += SpC(tm.entries(i, j) * creator(9, index_of(par, rows[i])) *
                   creator(9, index_of(par, cols[j])));
      VecC v = apply_exp(x, vacuum(9));
      MatR direct = covariance(v, 9);
      MajoranaCovariance m = fiducial_state_covariance(tm);
      CHECK((direct - m.matrix).cwiseAbs().maxCoeff() < 1e-10);
      CHECK(m.is_pure());
    }
}

TEST_CASE("fiducial block structure from the global symmetry") {
  std::mt19937 rng(3);
  const int a_set[5] = {0, 1, 2, 5, 6};
  const int b_set[4] = {3, 4, 7, 8};
  for (int rep = 0; rep < 5; ++rep) {
    TMatrix tm = build_t_matrix(random_params(rng, true));
    DiracCovarianceBlocks d = dirac_blocks(fiducial_state_covariance(tm).matrix);
    double worst = 0;
    for (int a : a_set)
      for (int b : b_set) worst = std::max({worst, std::abs(d.R(a, b)), std::abs(d.R(b, a))});
    for (int a : a_set)
      for (int a2 : a_set) worst = std::max(worst, std::abs(d.Q(a, a2)));
    for (int b : b_set)
      for (int b2 : b_set) worst = std::max(worst, std::abs(d.Q(b, b2)));
    CHECK(worst < 1e-10);
    cd tra = 0, trb = 0;
    for (int a : a_set) tra += d.R(a, a);
    for (int b : b_set) trb += d.R(b, b);
    // Every pair creates one mode of each set, so the traces differ by (i/2)(4 - 5).
    CHECK(std::abs(trb - tra - cd(0, -0.5)) < 1e-10);
  }
  ChannelBlocks decoupled = fiducial_covariance(build_t_matrix(params(0, 0, 0), Parity::Even, true));
  CHECK(decoupled.B.cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("magic point normalisation of the channel output") {
  PepsParameters p = params(0.6, 1, kSqrt2);
  ChannelBlocks b = fiducial_covariance(build_t_matrix(p));
  MatC g = gaussian_channel(b, bond_covariance(M_PI / 3, M_PI / 5));
  CHECK((g * g + MatC::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-8);
  MomentumBlock mb = momentum_block(p, M_PI / 3, M_PI / 5);
  CHECK(std::abs(mb.P * mb.P + mb.R * mb.R + mb.I * mb.I - 1) < 1e-8);
  CHECK(std::abs(mb.Dnorm - std::sqrt(mb.P0 * mb.P0 + mb.R0 * mb.R0 + mb.I0 * mb.I0)) < 1e-8);
}

TEST_CASE("channel against closed forms on random points") {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> uk(-M_PI, M_PI);
  double worst = 0;
  for (int rep = 0; rep < 10; ++rep) {
    PepsParameters p = random_params(rng);
    for (int s = 0; s < 10; ++s) {
      const double k1 = uk(rng), k2 = uk(rng);
      MomentumBlock mb = momentum_block(p, k1, k2);
      const double e = std::norm(mb.alpha) + std::norm(mb.beta);
      const cd delta = 2.0 * std::conj(mb.alpha) * mb.beta / e;
      worst = std::max({worst, std::abs(mb.R - (std::norm(mb.alpha) - std::norm(mb.beta)) / e),
                        std::abs(mb.P - delta.real()), std::abs(mb.I + delta.imag())});
    }
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("symmetries of the momentum blocks") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> uk(-M_PI, M_PI);
  for (int rep = 0; rep < 5; ++rep) {
    PepsParameters p = random_params(rng);
    const double k1 = uk(rng), k2 = uk(rng);
    MomentumBlock m = momentum_block(p, k1, k2);
    MomentumBlock rot = momentum_block(p, -k2, k1);
    CHECK(std::abs(rot.R - m.R) < 1e-10);
    CHECK(std::abs(rot.P + m.I) < 1e-10);
    CHECK(std::abs(rot.I - m.P) < 1e-10);
    MomentumBlock neg = momentum_block(p, -k1, -k2);
    CHECK(std::abs(neg.P + m.P) < 1e-10);
    CHECK(std::abs(neg.I + m.I) < 1e-10);
    CHECK(std::abs(neg.R - m.R) < 1e-10);
    // Odd harmonics flip sign under k -> k + (pi, pi), even ones do not.
    MomentumBlock sh = momentum_block(p, k1 + M_PI, k2 + M_PI);
    const double scale = std::max(1.0, m.Dnorm);
    CHECK(std::abs(sh.R0 - m.R0) < 1e-9 * scale);
    CHECK(std::abs(sh.P0 + m.P0) < 1e-9 * scale);
    CHECK(std::abs(sh.I0 + m.I0) < 1e-9 * scale);

    auto [a, b] = alpha_beta(p, k1, k2);
    auto [ar, br] = alpha_beta(p, -k2, k1);
    CHECK(std::abs(ar - a) < 1e-10 * std::max(1.0, std::abs(a)));
    CHECK(std::abs(br + cd(0, 1) * b) < 1e-10 * std::max(1.0, std::abs(b)));
  }
  MomentumBlock zero = momentum_block(params(0.8, 0.3, 0.7), 0, 0);
  CHECK(std::abs(zero.R - 1) < 1e-10);
  CHECK(std::abs(zero.P) < 1e-10);
  CHECK(std::abs(zero.I) < 1e-10);
}

TEST_CASE("closed forms at special points") {
  const double t = 0.7;
  for (auto [k1, k2] : {std::pair{0.3, 1.2}, std::pair{-2.0, 0.4}, std::pair{M_PI / 3, M_PI / 7}}) {
    auto [a, b] = alpha_beta(params(t, 1, kSqrt2), k1, k2);
    CHECK(std::abs(a - 16.0) < 1e-12);
    cd expect_b = 16 * (2 - kSqrt2) * t * t * cd(std::sin(k1), -std::sin(k2));
    CHECK(std::abs(b - expect_b) < 1e-10);

    auto [a0, b0] = alpha_beta(params(t, 0, 0), k1, k2);
    CHECK(std::abs(a0 - 1.0) < 1e-14);
    CHECK(std::abs(b0 - 2 * t * t * cd(std::sin(k1), -std::sin(k2))) < 1e-14);
    const double e = 1 + 4 * std::pow(t, 4) - 2 * std::pow(t, 4) * (std::cos(2 * k1) + std::cos(2 * k2));
    CHECK(dispersion(params(t, 0, 0), k1, k2) == doctest::Approx(e).epsilon(1e-12));

    auto [ae, be] = alpha_beta(params(t, 1, 0), k1, k2);
    const double s1 = std::sin(k1), s2 = std::sin(k2);
    CHECK(std::abs(ae - 16 * s1 * s1 * s2 * s2) < 1e-12);
    CHECK(std::abs(be - 16 * t * t * s1 * s2 * cd(s2, -s1)) < 1e-12);
  }
  MatC s = bond_pairing(M_PI / 3, -M_PI / 7);
  MatC tau = build_t_matrix(params(1, 1, kSqrt2)).tau();
  CHECK(std::abs(det_identity_F(s, s, tau, tau) - 16.0) < 1e-10);
}

TEST_CASE("closed forms against the determinant identity") {
  std::mt19937 rng(6);
  std::uniform_real_distribution<double> uk(-M_PI, M_PI);
  double worst = 0;
  for (int rep = 0; rep < 20; ++rep) {
    PepsParameters p = random_params(rng, rep % 2 == 1);
    for (int s = 0; s < 20; ++s) {
      const double k1 = uk(rng), k2 = uk(rng);
      auto [a, b] = alpha_beta(p, k1, k2);
      auto [af, bf] = alpha_beta_from_F(p, k1, k2);
      const double scale = std::max({1.0, std::abs(a), std::abs(b)});
      worst = std::max({worst, std::abs(a - af) / scale, std::abs(b - bf) / scale});
    }
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("unpaired amplitudes") {
  auto amp = unpaired_amplitudes(params(1, 0, 0));
  for (cd a : amp) CHECK(std::abs(a - 1.0) < 1e-15);
  CHECK(std::abs(unpaired_amplitudes(params(1, 1, 0))[0]) < 1e-15);
  auto d = unpaired_amplitudes(params(1, 0, 1));
  CHECK(std::abs(d[0]) < 1e-15);
  CHECK(std::abs(d[2] - 4.0) < 1e-15);

  std::mt19937 rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    PepsParameters p = random_params(rng);
    auto at = unpaired_amplitudes(p);
    for (int q = 0; q < 4; ++q) {
      auto [k1, k2] = unpaired_momenta()[q];
      auto [a, b] = alpha_beta(p, k1, k2);
      CHECK(std::abs(at[q] * at[q] - a) < 1e-10 * std::max(1.0, std::abs(a)));
      CHECK(std::abs(b) < 1e-10);
      CHECK(std::abs(dispersion(p, k1, k2) - std::pow(std::abs(at[q]), 4)) <
            1e-9 * std::max(1.0, dispersion(p, k1, k2)));
    }
  }
  CHECK(dispersion(params(1, 0.3, 1.3), 0, 0) < 1e-10);
  CHECK(dispersion(params(0.5, 1, kSqrt2), 0, 0) == doctest::Approx(256.0));
}

TEST_CASE("channel determinant is proportional to the dispersion") {
  for (PepsParameters p : {params(0.6, 1, kSqrt2), params(0.9, 0.4, -0.8), params(1.2, 0, 0)}) {
    std::vector<double> ratio;
    for (int a = 0; a < 10; ++a)
      for (int b = 0; b < 10; ++b) {
        const double k1 = 2 * M_PI * (a + 0.3) / 10, k2 = 2 * M_PI * (b + 0.6) / 10;
        ratio.push_back(momentum_block(p, k1, k2).Dnorm / dispersion(p, k1, k2));
      }
    const double mean = std::accumulate(ratio.begin(), ratio.end(), 0.0) / ratio.size();
    for (double r : ratio) CHECK(std::abs(r - mean) < 1e-8 * mean);
  }
  // Trivial point: proportional to 1 + 4 t^4 at k = (pi/2, 0).
  const double t = 0.8;
  PepsParameters p = params(t, 0, 0);
  const double c = momentum_block(p, 0.4, 1.1).Dnorm / dispersion(p, 0.4, 1.1);
  CHECK(momentum_block(p, M_PI / 2, 0).Dnorm == doctest::Approx(c * (1 + 4 * std::pow(t, 4))).epsilon(1e-10));
}

TEST_CASE("magic point unnormalised coefficients") {
  const double t = 0.6324;
  PepsParameters p = params(t, 1, kSqrt2);
  const double c = 2 - kSqrt2;
  const double scale = momentum_block(p, 0.2, 0.9).Dnorm / dispersion(p, 0.2, 0.9) * 256;
  for (auto [k1, k2] : {std::pair{0.2, 0.9}, std::pair{-1.3, 2.2}, std::pair{2.9, -0.1}}) {
    MomentumBlock mb = momentum_block(p, k1, k2);
    const double r0 = 1 - c * c * std::pow(t, 4) + 0.5 * c * c * std::pow(t, 4) * (std::cos(2 * k1) + std::cos(2 * k2));
    CHECK(std::abs(mb.R0 / scale - r0) < 1e-10);
    CHECK(std::abs(mb.P0 / scale - 2 * c * t * t * std::sin(k1)) < 1e-10);
    CHECK(std::abs(mb.I0 / scale - 2 * c * t * t * std::sin(k2)) < 1e-10);
  }
}

TEST_CASE("phase classification") {
  CHECK(classify_phase(0, 1) == PhaseLabel::D);
  CHECK(classify_phase(0, -1) == PhaseLabel::D);
  CHECK(classify_phase(1, 0) == PhaseLabel::E);
  CHECK(classify_phase(-1, 0) == PhaseLabel::E);
  CHECK(classify_phase(1, kSqrt2) == PhaseLabel::Gapped);
  CHECK(classify_phase(0, 0) == PhaseLabel::Gapped);
  CHECK(classify_phase(0.3, 1.3) == PhaseLabel::A);
  CHECK(classify_phase(0.3, -0.7) == PhaseLabel::A);
  CHECK(classify_phase(0.4, 0.6) == PhaseLabel::B);
  CHECK(classify_phase(-0.4, -0.6) == PhaseLabel::B);
  CHECK(classify_phase(kSqrt2, 1) == PhaseLabel::C);
  CHECK(classify_phase(-std::sqrt(5.0), 2) == PhaseLabel::C);
}

TEST_CASE("Chern numbers") {
  for (auto [y, z] : {std::pair{1.0, kSqrt2}, std::pair{0.0, 0.0}, std::pair{2.5, 0.3}, std::pair{-0.2, 2.5}, std::pair{0.5, 0.2}})
    CHECK(chern_number(params(0.8, y, z)) == 0);
  CHECK(chern_number(params(0.8, 0.4, 0.6)) == -2);
  CHECK(chern_number(params(0.8, kSqrt2, 1)) == 2);
  CHECK(chern_number(params(0.8, 0, 1)) == -2);
  CHECK(chern_number(params(0.8, 0.3, 1.3)) == 0);
}

TEST_CASE("parent Hamiltonian at the trivial point") {
  const double t = 0.7;
  ParentHamiltonianCoeffs h = parent_hamiltonian(params(t, 0, 0, 8, 8));
  const double t4 = std::pow(t, 4);
  CHECK(h.hopping.at({0, 0}) == doctest::Approx(1 - 4 * t4).epsilon(1e-12));
  CHECK(h.hopping.at({2, 0}) == doctest::Approx(t4).epsilon(1e-12));
  CHECK(h.hopping.at({0, -2}) == doctest::Approx(t4).epsilon(1e-12));
  CHECK(h.hopping.size() == 5);
  // Delta_0(k) = 4 t^2 (sin k1 - i sin k2): 2i t^2 along e1, 2 t^2 along e2.
  CHECK(std::abs(h.pairing.at({1, 0}) - cd(0, 2 * t * t)) < 1e-12);
  CHECK(std::abs(h.pairing.at({-1, 0}) - cd(0, -2 * t * t)) < 1e-12);
  CHECK(std::abs(h.pairing.at({0, 1}) - 2 * t * t) < 1e-12);
  CHECK(std::abs(h.pairing.at({0, -1}) + 2 * t * t) < 1e-12);
  CHECK(h.pairing.size() == 4);
  CHECK_THROWS_AS(parent_hamiltonian(params(t, 0, 0, 6, 8)), GeometryError);
}

TEST_CASE("parent Hamiltonian structure") {
  std::mt19937 rng(8);
  for (int rep = 0; rep < 3; ++rep) {
    PepsParameters p = random_params(rng);
    p.L1 = p.L2 = 10;
    ParentHamiltonianCoeffs h = parent_hamiltonian(p, 0.0);
    double scale = 0;
    for (auto& [x, v] : h.hopping) scale = std::max(scale, std::abs(v));
    for (auto& [x, v] : h.hopping) {
      auto [x1, x2] = x;
      if (std::abs(x1) > 4 || std::abs(x2) > 4 || (x1 + x2) % 2 != 0) CHECK(std::abs(v) < 1e-9 * scale);
      auto r = h.hopping.find({-x2 == -5 ? 5 : -x2, x1});
      if (r != h.hopping.end()) CHECK(std::abs(r->second - v) < 1e-9 * scale);
    }
    for (auto& [x, v] : h.pairing) {
      auto [x1, x2] = x;
      if (std::abs(x1) > 4 || std::abs(x2) > 4 || (x1 + x2) % 2 == 0) CHECK(std::abs(v) < 1e-9 * scale);
      auto r = h.pairing.find({-x2 == -5 ? 5 : -x2, x1});
      if (r != h.pairing.end()) CHECK(std::abs(r->second + cd(0, 1) * v) < 1e-9 * scale);
    }
  }
  ParentHamiltonianCoeffs magic = parent_hamiltonian(params(0.6, 1, kSqrt2, 8, 8), 1e-10);
  for (auto& [x, v] : magic.pairing) CHECK(std::abs(x.first) + std::abs(x.second) == 1);
}

TEST_CASE("correlators") {
  PepsParameters p = params(0.6324, 1, kSqrt2, 16, 16);
  Correlators c = correlators(p);
  BcsState s = bcs_state(p);
  double rsum = 0;
  for (auto& m : s.grid) rsum += m.R;
  CHECK(std::abs(c.hopping.at({0, 0}) - 0.5 * (1 - rsum / s.grid.size())) < 1e-12);
  for (auto& [x, v] : c.hopping)
    if ((x.first + x.second) % 2 != 0) CHECK(std::abs(v) < 1e-10);
  for (auto& [x, v] : c.pairing)
    if ((x.first + x.second) % 2 == 0) CHECK(std::abs(v) < 1e-10);
  // Exponential decay along the axis; frozen from L = 32.
  Correlators big = correlators(params(0.6324, 1, kSqrt2, 32, 32));
  double prev = std::abs(big.pairing.at({1, 0}));
  const double near = prev;
  for (int x = 3; x <= 7; x += 2) {
    const double v = std::abs(big.pairing.at({x, 0}));
    CHECK(v < 0.02 * prev);
    prev = v;
  }
  CHECK(std::abs(big.pairing.at({1, 0})) == doctest::Approx(0.1097).epsilon(1e-3));
  CHECK(prev < 3e-6 * near);
}

TEST_CASE("pairing function on the E point") {
  // alpha vanishes on the k axes of the periodic grid, so use the shifted one.
  PepsParameters p = params(0.8, 1, 0, 12, 12);
  CHECK_THROWS_AS(correlators(p), SingularChannelError);
  auto g = pairing_function(p, true);
  for (auto& [x, v] : g) {
    const bool odd_axis = (x.second == 0 && x.first % 2 != 0) || (x.first == 0 && x.second % 2 != 0);
    if (odd_axis)
      CHECK(std::abs(v) == doctest::Approx(0.64).epsilon(1e-9));
    else
      CHECK(std::abs(v) < 1e-10);
  }
  CHECK(std::abs(g.at({1, 0}) - cd(0, 0.64)) < 1e-10);
  CHECK(std::abs(g.at({0, 1}) - cd(0.64, 0)) < 1e-10);
  // The correlator itself spreads off the axes.
  Correlators e = correlators(p, true);
  CHECK(std::abs(e.pairing.at({2, 1})) > 1e-3);
}

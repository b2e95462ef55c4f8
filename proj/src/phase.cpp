#include <cmath>

#include <Eigen/Eigenvalues>

#include "gp/fpeps.hpp"

namespace gp {

std::string to_string(PhaseLabel l) {
  switch (l) {
    case PhaseLabel::Gapped: return "gapped";
    case PhaseLabel::A: return "A";
    case PhaseLabel::B: return "B";
    case PhaseLabel::C: return "C";
    case PhaseLabel::D: return "D";
    case PhaseLabel::E: return "E";
  }
  return "?";
}

PhaseLabel classify_phase(cd y, cd z, double tol) {
  const cd minus = 1.0 - (y - z) * (y - z);  // zero on z = y +- 1
  const cd plus = 1.0 - (y + z) * (y + z);   // zero on z = -y +- 1
  const cd hyp = 1.0 - y * y + z * z;        // zero on y^2 - z^2 = 1
  const double alpha0 = std::norm(minus * plus);
  const double alphapi = std::norm(hyp * hyp);
  const bool gap0 = alpha0 < tol, gappi = alphapi < tol;
  if (!gap0 && !gappi) return PhaseLabel::Gapped;
  if (gap0 && gappi) return PhaseLabel::E;
  if (gappi) return PhaseLabel::C;
  // Both line families vanish together only at the intersection points.
  const double f = std::sqrt(tol);
  const bool on_a = std::abs(minus) * std::abs(minus) < f;
  const bool on_b = std::abs(plus) * std::abs(plus) < f;
  if (on_a && on_b) return PhaseLabel::D;
  return on_a ? PhaseLabel::A : PhaseLabel::B;
}

namespace {

Eigen::Vector2cd upper_band(double P0, double I0, double R0) {
  Eigen::Matrix2cd h;
  const cd i(0, 1);
  h << R0, P0 - i * I0, P0 + i * I0, -R0;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(h);
  return es.eigenvectors().col(1);
}

}  // namespace

int chern_number(const PepsParameters& p, int n) {
  std::vector<Eigen::Vector2cd> u(static_cast<size_t>(n) * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const double k1 = 2 * M_PI * (a + 0.5) / n, k2 = 2 * M_PI * (b + 0.5) / n;
      auto [al, be] = alpha_beta(p, k1, k2);
      const cd delta = 2.0 * std::conj(al) * be;
      const double R0 = std::norm(al) - std::norm(be);
      const double scale = std::norm(al) + std::norm(be);
      if (!(scale > 0)) throw NondeterminateChern("band touching on a grid corner");
      u[a * n + b] = upper_band(delta.real() / scale, -delta.imag() / scale, R0 / scale);
    }
  auto at = [&](int a, int b) -> const Eigen::Vector2cd& { return u[((a + n) % n) * n + (b + n) % n]; };
  auto link = [](const Eigen::Vector2cd& x, const Eigen::Vector2cd& y) {
    cd v = x.dot(y);
    return v / std::abs(v);
  };
  double total = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      cd loop = link(at(a, b), at(a + 1, b)) * link(at(a + 1, b), at(a + 1, b + 1)) *
                link(at(a + 1, b + 1), at(a, b + 1)) * link(at(a, b + 1), at(a, b));
      const double f = std::arg(loop);
      if (M_PI - std::abs(f) < 1e-6) throw NondeterminateChern("plaquette flux at +-pi");
      total += f;
    }
  return static_cast<int>(std::lround(total / (2 * M_PI)));
}

}  // namespace gp

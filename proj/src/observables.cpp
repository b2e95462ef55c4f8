#include "gp/observables.hpp"

#include <array>
#include <cmath>

#include "gp/errors.hpp"

namespace gp {

namespace {

int wrap(int x, int L) { return ((x % L) + L) % L; }

// Link element for one step from (x1, x2); orientation +1 gives Sigma+ on
// rightward / upward steps.
PathElement step(int& x1, int& x2, char move, int orientation) {
  const OpTag fwd = orientation > 0 ? OpTag::SigmaPlus : OpTag::SigmaMinus;
  const OpTag back = orientation > 0 ? OpTag::SigmaMinus : OpTag::SigmaPlus;
  PathElement e;
  switch (move) {
    case 'R': e = {x1, x2, Slot::S, fwd}; ++x1; break;
    case 'U': e = {x1, x2, Slot::T, fwd}; ++x2; break;
    case 'L': --x1; e = {x1, x2, Slot::S, back}; break;
    case 'D': --x2; e = {x1, x2, Slot::T, back}; break;
    default: throw GeometryError(std::string("unknown path move ") + move);
  }
  return e;
}

ObservableSpec string_spec(ObservableKind kind, int x1, int x2, const std::string& moves, int L1,
                           OpTag end_tag) {
  ObservableSpec s;
  s.kind = kind;
  const int orientation = vertex_sign(x1, x2);
  s.path.push_back({wrap(x1, L1), x2, Slot::Psi, OpTag::Create});
  int a = x1, b = x2;
  for (char m : moves) {
    PathElement e = step(a, b, m, orientation);
    e.x1 = wrap(e.x1, L1);
    s.path.push_back(e);
  }
  s.path.push_back({wrap(a, L1), b, Slot::Psi, end_tag});
  s.label = to_string(kind) + "(" + std::to_string(x1) + "," + std::to_string(x2) + "," + moves + ")";
  return s;
}

}  // namespace

ObservableSpec wilson_loop_spec(int l1, int l2, int x1, int x2, int L1, bool allow_wrap) {
  if (l1 < 1 || l2 < 1) throw GeometryError("loop sides must be positive");
  if (l1 > L1 - 1 && !(allow_wrap && l1 == L1)) throw GeometryError("loop wider than the circumference allows");
  if (x2 < 0) throw GeometryError("loop below the cylinder");
  ObservableSpec s;
  s.kind = ObservableKind::WilsonLoop;
  int a = x1, b = x2;
  const std::string moves = std::string(l2, 'U') + std::string(l1, 'R') + std::string(l2, 'D') + std::string(l1, 'L');
  for (char m : moves) {
    PathElement e = step(a, b, m, 1);
    e.x1 = wrap(e.x1, L1);
    s.path.push_back(e);
  }
  s.label = "W(" + std::to_string(l1) + "," + std::to_string(l2) + ")@" + std::to_string(x1) + "," + std::to_string(x2);
  return s;
}

ObservableSpec noncontractible_wilson_spec(int x2, int L1) {
  ObservableSpec s;
  s.kind = ObservableKind::NonContractibleWilson;
  for (int x = 0; x < L1; ++x) s.path.push_back({x, x2, Slot::S, OpTag::SigmaPlus});
  s.label = "Wnc@" + std::to_string(x2);
  return s;
}

ObservableSpec thooft_loop_spec(int x1, int x2, int w, int h, int L1, double q) {
  if (w < 1 || h < 1) throw GeometryError("empty region");
  if (w > L1 - 1) throw GeometryError("region wraps the cylinder; use the non-contractible loop");
  if (x2 < 0) throw GeometryError("region below the cylinder");
  ObservableSpec s;
  s.kind = ObservableKind::ThooftLoop;
  for (int b = x2; b < x2 + h; ++b) {
    // left and right boundaries cross side links
    s.path.push_back({wrap(x1 - 1, L1), b, Slot::S, OpTag::Phase, -q});
    s.path.push_back({wrap(x1 + w - 1, L1), b, Slot::S, OpTag::Phase, q});
  }
  for (int a = x1; a < x1 + w; ++a) {
    if (x2 > 0) s.path.push_back({wrap(a, L1), x2 - 1, Slot::T, OpTag::Phase, -q});
    s.path.push_back({wrap(a, L1), x2 + h - 1, Slot::T, OpTag::Phase, q});
  }
  s.label = "G(" + std::to_string(w) + "x" + std::to_string(h) + ")@" + std::to_string(x1) + "," + std::to_string(x2);
  return s;
}

ObservableSpec noncontractible_thooft_spec(int x2, int L1, double q) {
  ObservableSpec s;
  s.kind = ObservableKind::NonContractibleThooft;
  for (int x = 0; x < L1; ++x) s.path.push_back({x, x2, Slot::T, OpTag::Phase, q});
  s.label = "Gnc@" + std::to_string(x2);
  return s;
}

ObservableSpec meson_spec(int x1, int x2, const std::string& moves, int L1) {
  int a = x1, b = x2;
  for (char m : moves) step(a, b, m, 1);
  if (vertex_sign(x1, x2) < 0) throw StaggeringError("a meson starts on an even vertex");
  if (vertex_sign(a, b) > 0) throw StaggeringError("a meson ends on an odd vertex");
  if (L1 % 2) throw StaggeringError("odd circumference has no consistent staggering");
  return string_spec(ObservableKind::MesonString, x1, x2, moves, L1, OpTag::Create);
}

ObservableSpec tunnel_spec(int x1, int x2, const std::string& moves, int L1) {
  int a = x1, b = x2;
  for (char m : moves) step(a, b, m, 1);
  if (vertex_sign(x1, x2) != vertex_sign(a, b)) throw StaggeringError("tunnelling joins vertices of one sublattice");
  if (L1 % 2) throw StaggeringError("odd circumference has no consistent staggering");
  return string_spec(ObservableKind::TunnelString, x1, x2, moves, L1, OpTag::Annihilate);
}

std::map<std::pair<int, int>, int> gauss_defects(const ObservableSpec& spec, int L1) {
  std::map<std::pair<int, int>, int> d;
  for (const PathElement& e : spec.path) {
    const int a = wrap(e.x1, L1);
    int delta = 0;
    switch (e.tag) {
      case OpTag::SigmaPlus: delta = 1; break;
      case OpTag::SigmaMinus: delta = -1; break;
      case OpTag::Create: d[{a, e.x2}] -= vertex_sign(a, e.x2); continue;
      case OpTag::Annihilate: d[{a, e.x2}] += vertex_sign(a, e.x2); continue;
      default: continue;
    }
    d[{a, e.x2}] += delta;
    if (e.slot == Slot::S) d[{wrap(a + 1, L1), e.x2}] -= delta;
    else d[{a, e.x2 + 1}] -= delta;
  }
  for (auto it = d.begin(); it != d.end();) it = it->second == 0 ? d.erase(it) : std::next(it);
  return d;
}

bool gauge_consistent(const ObservableSpec& spec, int L1) { return gauss_defects(spec, L1).empty(); }

cd LoopStats::at(int l1, int l2) const {
  if (l1 == 0 || l2 == 0) return 1.0;
  auto it = table.find({l1, l2});
  if (it == table.end()) throw GeometryError("loop missing from the table");
  return it->second;
}

double creutz_chi(const LoopStats& stats, int l1, int l2) {
  const cd a = stats.at(l1, l2), b = stats.at(l1 - 1, l2 - 1);
  const cd c = stats.at(l1 - 1, l2), d = stats.at(l1, l2 - 1);
  for (cd v : {a, b, c, d})
    if (std::abs(v) <= stats.floor) throw NumericalFloorError("Wilson loop below the numerical floor");
  return -std::log(std::abs(a * b / (c * d)));
}

LoopFit fit_area_perimeter(const LoopStats& stats) {
  std::vector<std::array<double, 4>> rows;
  for (auto& [k, v] : stats.table) {
    if (std::abs(v) <= stats.floor) continue;
    const double l1 = k.first, l2 = k.second;
    rows.push_back({l1 * l2, 2 * (l1 + l2), 1.0, std::log(std::abs(v))});
  }
  LoopFit fit;
  fit.points = static_cast<int>(rows.size());
  if (rows.size() < 3) {
    fit.law = "undetermined";
    return fit;
  }
  MatR A(rows.size(), 3);
  VecR b(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    A.row(i) << rows[i][0], rows[i][1], rows[i][2];
    b(i) = rows[i][3];
  }
  const VecR c = A.colPivHouseholderQr().solve(b);
  fit.kappa_area = -c(0);
  fit.kappa_perimeter = -c(1);
  fit.constant = c(2);
  fit.residual = (A * c - b).norm();
  const double ka = std::abs(fit.kappa_area), kp = std::abs(fit.kappa_perimeter);
  fit.law = ka >= 3 * kp ? "area" : (kp >= 3 * ka ? "perimeter" : "undetermined");
  return fit;
}

LoopStats wilson_table(const PepsParameters& p, int L1, const LoopTableOptions& opt,
                       const TransferLimits& limits) {
  const Geometry g{L1, opt.max_l2 + 1 + 2 * opt.buffer, opt.boundary_flux};
  std::vector<ObservableSpec> specs;
  std::vector<std::pair<int, int>> keys;
  for (int l1 = 1; l1 <= opt.max_l1; ++l1)
    for (int l2 = 1; l2 <= opt.max_l2; ++l2)
      for (int anchor = 0; anchor < 2; ++anchor) {
        specs.push_back(wilson_loop_spec(l1, l2, anchor, opt.buffer, L1));
        keys.emplace_back(l1, l2);
      }
  const std::vector<cd> v = expectations(p, g, specs, limits);
  LoopStats stats;
  for (std::size_t i = 0; i < v.size(); ++i) stats.table[keys[i]] += 0.5 * v[i];
  return stats;
}

Horseshoe horseshoe(const PepsParameters& p, int L1, int l, int buffer, const TransferLimits& limits,
                    double floor) {
  if (l < 1 || l % 2 == 0) throw GeometryError("the horseshoe needs an odd height");
  if (L1 < 4) throw GeometryError("the horseshoe is four links wide");
  const Geometry g{L1, l + 1 + 2 * buffer, 0};
  const int x2 = buffer;
  const int xc = x2 % 2;  // even start vertex
  const ObservableSpec m = meson_spec(xc, x2, "LL" + std::string(l, 'U') + "RR", L1);
  const ObservableSpec w = wilson_loop_spec(4, l, xc - 2, x2, L1, true);
  const std::vector<cd> v = expectations(p, g, {m, w}, limits);
  Horseshoe h{v[0], v[1], 0.0};
  if (!(h.wilson.real() > floor)) throw NumericalFloorError("nonpositive Wilson loop in the horseshoe");
  h.rho = std::abs(h.meson) / std::sqrt(h.wilson.real());
  return h;
}

namespace {

ObservableSpec adjoint_loop(const ObservableSpec& s) {
  ObservableSpec a = s;
  for (PathElement& e : a.path) {
    if (e.tag == OpTag::SigmaPlus) e.tag = OpTag::SigmaMinus;
    else if (e.tag == OpTag::SigmaMinus) e.tag = OpTag::SigmaPlus;
  }
  return a;
}

ObservableSpec concat(const ObservableSpec& a, const ObservableSpec& b) {
  ObservableSpec c = a;
  c.path.insert(c.path.end(), b.path.begin(), b.path.end());
  return c;
}

}  // namespace

cd wilson_wilson_correlation(const PepsParameters& p, const Geometry& g, int x2, int separation,
                             const TransferLimits& limits) {
  const ObservableSpec a = noncontractible_wilson_spec(x2, g.L1);
  const ObservableSpec b = adjoint_loop(noncontractible_wilson_spec(x2 + separation, g.L1));
  const std::vector<cd> v = expectations(p, g, {concat(a, b), a, b}, limits);
  return v[0] - v[1] * v[2];
}

CorrelationFit wilson_correlation_decay(const PepsParameters& p, int L1, int max_sep, int buffer,
                                        const TransferLimits& limits, double floor) {
  const Geometry g{L1, max_sep + 1 + 2 * buffer, 0};
  const int x2 = buffer;
  std::vector<ObservableSpec> specs;
  const ObservableSpec a = noncontractible_wilson_spec(x2, L1);
  specs.push_back(a);
  for (int d = 1; d <= max_sep; ++d) {
    const ObservableSpec b = adjoint_loop(noncontractible_wilson_spec(x2 + d, L1));
    specs.push_back(b);
    specs.push_back(concat(a, b));
  }
  const std::vector<cd> v = expectations(p, g, specs, limits);
  CorrelationFit fit;
  std::vector<double> xs, ys;
  for (int d = 1; d <= max_sep; ++d) {
    const cd c = v[2 * d] - v[0] * v[2 * d - 1];
    fit.separations.push_back(d);
    fit.values.push_back(std::abs(c));
    // Points below the floor end the resolvable range.
    if (std::abs(c) > floor && static_cast<int>(xs.size()) == d - 1) {
      xs.push_back(d);
      ys.push_back(std::log(std::abs(c)));
    }
  }
  fit.used = static_cast<int>(xs.size());
  if (fit.used >= 2) {
    const double n = fit.used;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (int i = 0; i < fit.used; ++i) {
      sx += xs[i];
      sy += ys[i];
      sxx += xs[i] * xs[i];
      sxy += xs[i] * ys[i];
      syy += ys[i] * ys[i];
    }
    const double vx = sxx - sx * sx / n, vy = syy - sy * sy / n, cxy = sxy - sx * sy / n;
    fit.slope = cxy / vx;
    fit.r2 = vy > 0 ? cxy * cxy / (vx * vy) : 1.0;
    fit.reliable = fit.used >= 3 && fit.slope < 0 && fit.r2 > 0.98;
  }
  return fit;
}

}  // namespace gp

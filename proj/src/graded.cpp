#include <cmath>
#include <map>

#include "gp/fock.hpp"
#include "gp/gauge.hpp"

namespace gp {

namespace {

using SpC = Eigen::SparseMatrix<cd>;
using Triplet = Eigen::Triplet<cd>;

int mode_of(Parity parity, const std::string& label) {
  const auto& order = fiducial_mode_order(parity);
  for (int j = 0; j < kVertexModes; ++j)
    if (order[j] == label) return j;
  throw std::out_of_range("no vertex mode " + label);
}

// Boson dressing of a virtual creation operator: 0 none, +1 / -1 raise or
// lower; `top` tells which link.
struct Dressing {
  int shift = 0;
  bool top = false;
};

Dressing dressing(const std::string& label, AbVariant variant) {
  if (label == "r+") return {variant == AbVariant::FlippedSide ? -1 : 1, false};
  if (label == "r-") return {-1, false};
  if (label == "u+") return {1, true};
  if (label == "u-") return {-1, true};
  return {};
}

}  // namespace

const LinkSpace& LinkSpace::get() {
  static const LinkSpace ls = [] {
    LinkSpace l;
    l.Sigma = Eigen::Vector3d(1, 0, -1).asDiagonal();
    l.SigmaPlus << 0, 1, 0, 0, 0, 1, 0, 0, 0;
    l.SigmaMinus = l.SigmaPlus.transpose();
    return l;
  }();
  return ls;
}

Eigen::Matrix3cd LinkSpace::phase(double q) {
  Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
  for (int i = 0; i < 3; ++i) m(i, i) = std::polar(1.0, q * level(i));
  return m;
}

GradedOperator compose(const GradedOperator& a, const GradedOperator& b) {
  GradedOperator r;
  r.action = a.action * b.action;
  r.parity = a.parity == b.parity ? Parity::Even : Parity::Odd;
  r.support = a.support;
  r.support.insert(r.support.end(), b.support.begin(), b.support.end());
  return r;
}

GradedOperator local_fermion(int mode, bool create) {
  std::vector<Triplet> trip;
  for (int i = 0; i < kLocalDim; ++i) {
    const unsigned f = local_fbits(i);
    const bool occ = f >> mode & 1u;
    if (occ == create) continue;
    trip.emplace_back(i ^ (1 << mode), i, double(jw_sign(f, mode)));
  }
  GradedOperator g;
  g.action.resize(kLocalDim, kLocalDim);
  g.action.setFromTriplets(trip.begin(), trip.end());
  g.parity = Parity::Odd;
  g.support = {"mode" + std::to_string(mode)};
  return g;
}

GradedOperator local_link(const Eigen::Matrix3cd& op, bool top) {
  std::vector<Triplet> trip;
  for (int i = 0; i < kLocalDim; ++i) {
    const int s = local_s_level(i), t = local_t_level(i);
    const int col = LinkSpace::index(top ? t : s);
    for (int row = 0; row < 3; ++row) {
      if (op(row, col) == 0.0) continue;
      const int lv = LinkSpace::level(row);
      trip.emplace_back(local_index(local_fbits(i), top ? s : lv, top ? lv : t), i, op(row, col));
    }
  }
  GradedOperator g;
  g.action.resize(kLocalDim, kLocalDim);
  g.action.setFromTriplets(trip.begin(), trip.end());
  g.support = {top ? "t" : "s"};
  return g;
}

GradedOperator build_ab_operator(const PepsParameters& p, Parity parity, AbVariant variant) {
  const TMatrix tm = build_t_matrix(p, parity, true);
  const auto& order = fiducial_mode_order(parity);
  std::vector<Triplet> trip;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 4; ++j) {
      const cd c = tm.entries(i, j);
      if (c == 0.0) continue;
      const int a = t_row_mode(i), b = t_col_mode(j);
      const Dressing da = dressing(order[a], variant), db = dressing(order[b], variant);
      for (int idx = 0; idx < kLocalDim; ++idx) {
        unsigned f = local_fbits(idx);
        if ((f >> a & 1u) || (f >> b & 1u)) continue;
        int s = local_s_level(idx), t = local_t_level(idx);
        // c_a^dag c_b^dag: b acts first
        double sign = jw_sign(f, b);
        f |= 1u << b;
        sign *= jw_sign(f, a);
        f |= 1u << a;
        bool alive = true;
        for (const Dressing& d : {db, da}) {
          if (d.shift == 0) continue;
          int& lv = d.top ? t : s;
          lv += d.shift;
          if (lv < -1 || lv > 1) alive = false;
        }
        if (alive) trip.emplace_back(local_index(f, s, t), idx, c * sign);
      }
    }
  SpC x(kLocalDim, kLocalDim);
  x.setFromTriplets(trip.begin(), trip.end());
  // X creates two fermions per power, so X^5 = 0 on nine modes.
  SpC id(kLocalDim, kLocalDim);
  id.setIdentity();
  SpC term = id, sum = id;
  for (int n = 1; n <= 4; ++n) {
    term = SpC(x * term) / cd(n);
    sum += term;
  }
  sum.prune(cd(0.0));
  GradedOperator g;
  g.action = sum;
  g.support = {order.begin(), order.end()};
  g.support.push_back("s");
  g.support.push_back("t");
  return g;
}

VecC gauged_fiducial(const PepsParameters& p, Parity parity, AbVariant variant) {
  GradedOperator ab = build_ab_operator(p, parity, variant);
  return VecC(ab.action.col(local_index(0, 0, 0)));
}

VecR virtual_field(Parity parity, char edge) {
  const std::string plus = std::string(1, edge) + "+", minus = std::string(1, edge) + "-";
  const int mp = mode_of(parity, plus), mm = mode_of(parity, minus);
  VecR v(kLocalDim);
  for (int i = 0; i < kLocalDim; ++i) {
    const unsigned f = local_fbits(i);
    v(i) = double(f >> mp & 1u) - double(f >> mm & 1u);
  }
  return v;
}

VecR link_field(bool top) {
  VecR v(kLocalDim);
  for (int i = 0; i < kLocalDim; ++i) v(i) = top ? local_t_level(i) : local_s_level(i);
  return v;
}

VecR matter_number() {
  VecR v(kLocalDim);
  for (int i = 0; i < kLocalDim; ++i) v(i) = double(local_fbits(i) & 1u);
  return v;
}

}  // namespace gp

#pragma once

#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "gp/fpeps.hpp"

namespace gp {

// l = 1 link, basis {|+1>, |0>, |-1>}.
struct LinkSpace {
  static constexpr int dim = 3;
  Eigen::Matrix3d Sigma;
  Eigen::Matrix3d SigmaPlus;
  Eigen::Matrix3d SigmaMinus;

  static const LinkSpace& get();
  static int index(int level) { return 1 - level; }
  static int level(int index) { return 1 - index; }
  static Eigen::Matrix3cd phase(double q);  // exp(i q Sigma)
};

// s_x = (-1)^(x1 + x2); even vertices host particles, odd ones antiparticles.
inline int vertex_sign(int x1, int x2) { return ((x1 + x2) % 2 + 2) % 2 == 0 ? 1 : -1; }
inline Parity vertex_parity(int x1, int x2) { return vertex_sign(x1, x2) > 0 ? Parity::Even : Parity::Odd; }

// Local vertex space: 9 fermion modes in fiducial_mode_order(parity) (bit j =
// mode j) times the side link s and the top link t.
constexpr int kVertexModes = 9;
constexpr int kLocalDim = 512 * 9;
inline int local_index(unsigned fbits, int s_level, int t_level) {
  return static_cast<int>(fbits) + 512 * (3 * LinkSpace::index(s_level) + LinkSpace::index(t_level));
}
inline unsigned local_fbits(int index) { return static_cast<unsigned>(index % 512); }
inline int local_s_level(int index) { return LinkSpace::level(index / 512 / 3); }
inline int local_t_level(int index) { return LinkSpace::level(index / 512 % 3); }

struct GradedOperator {
  Eigen::SparseMatrix<cd> action;
  Parity parity = Parity::Even;
  std::vector<std::string> support;
};

GradedOperator compose(const GradedOperator& a, const GradedOperator& b);

// Creation (create = true) or annihilation of local fermion `mode`.
GradedOperator local_fermion(int mode, bool create);
// A link operator on the side (`top` = false) or top link.
GradedOperator local_link(const Eigen::Matrix3cd& op, bool top);

enum class AbVariant {
  Exact,
  // r+^dag is dressed with Sigma_- instead of Sigma_+; violates the Gauss law.
  FlippedSide,
};

// A_b: exp(sum T_ij a_i^dag b_j^dag) with r_pm^dag -> Sigma_pm^s r_pm^dag and
// u_pm^dag -> Sigma_pm^t u_pm^dag.  t = 0 is allowed.
GradedOperator build_ab_operator(const PepsParameters& p, Parity parity,
                                 AbVariant variant = AbVariant::Exact);

// A_b |Omega> on the 4608-dimensional vertex space.
VecC gauged_fiducial(const PepsParameters& p, Parity parity, AbVariant variant = AbVariant::Exact);

// Virtual electric fields of the vertex as diagonals over local_index:
// E_r = n_{r+} - n_{r-}, E_u = n_{u+} - n_{u-}, E_l = n_{l+} - n_{l-},
// E_d = n_{d+} - n_{d-}.
VecR virtual_field(Parity parity, char edge);
VecR link_field(bool top);
VecR matter_number();

}  // namespace gp

#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gp/observable_spec.hpp"
#include "gp/transfer.hpp"

namespace gp {

// Clockwise l1 x l2 Wilson loop with lower-left corner (x1, x2): up the
// left edge, right along the top, down the right edge, back along the
// bottom.  Rightward and upward links carry Sigma+, the others Sigma-.
// Widths up to L1 - 1 fit without the loop touching itself; allow_wrap also
// admits l1 = L1 (the two vertical edges then share their links).
ObservableSpec wilson_loop_spec(int l1, int l2, int x1, int x2, int L1, bool allow_wrap = false);

// Product of Sigma+ on every side link of row x2.
ObservableSpec noncontractible_wilson_spec(int x2, int L1);

// exp(i q s_b Sigma) on the links leaving (s_b = +1) or entering (-1) the
// block of w x h vertices with lower-left vertex (x1, x2).
ObservableSpec thooft_loop_spec(int x1, int x2, int w, int h, int L1, double q);

// exp(i q Sigma) on the top links of row x2: the flux through the cylinder.
ObservableSpec noncontractible_thooft_spec(int x2, int L1, double q);

// Path moves: 'R', 'L', 'U', 'D'.  The meson starts with psi^dag on an even
// vertex and ends with psi^dag on an odd one; the tunnelling string moves a
// fermion between two vertices of the same sublattice.
ObservableSpec meson_spec(int x1, int x2, const std::string& moves, int L1);
ObservableSpec tunnel_spec(int x1, int x2, const std::string& moves, int L1);

// Net change of every Gauss-law charge; empty when the operator is gauge
// invariant.  x1 is taken modulo L1.
std::map<std::pair<int, int>, int> gauss_defects(const ObservableSpec& spec, int L1);
bool gauge_consistent(const ObservableSpec& spec, int L1);

struct LoopStats {
  std::map<std::pair<int, int>, cd> table;  // (l1, l2) -> <W>
  double floor = 1e-13;

  // W(0, l) = W(l, 0) = 1.
  cd at(int l1, int l2) const;
};

// -ln|W(l1,l2) W(l1-1,l2-1) / (W(l1-1,l2) W(l1,l2-1))|
double creutz_chi(const LoopStats& stats, int l1, int l2);

struct LoopFit {
  double kappa_area = 0, kappa_perimeter = 0, constant = 0;
  double residual = 0;
  std::string law;  // "area", "perimeter" or "undetermined"
  int points = 0;
};

// Least squares of log|W| against (l1 l2, 2 (l1 + l2), 1).
LoopFit fit_area_perimeter(const LoopStats& stats);

struct LoopTableOptions {
  int max_l1 = 2;
  int max_l2 = 4;
  int buffer = 2;  // rows between the loops and either boundary
  int boundary_flux = 0;
};

// Loops anchored on rows buffer .. buffer + l2, averaged over the two
// inequivalent anchor columns.
LoopStats wilson_table(const PepsParameters& p, int L1, const LoopTableOptions& opt,
                       const TransferLimits& limits = {});

struct Horseshoe {
  cd meson;
  cd wilson;
  double rho = 0;
};

// rho(l) = |<M^dag>| / sqrt(<W(4, l)>) with the meson running along the left
// half of the loop: from the bottom middle vertex two steps left, l up and
// two right.  l must be odd.
Horseshoe horseshoe(const PepsParameters& p, int L1, int l, int buffer = 2,
                    const TransferLimits& limits = {}, double floor = 1e-13);

struct CorrelationFit {
  std::vector<int> separations;
  std::vector<double> values;  // |connected correlator|
  double slope = 0;            // of log|corr| per row
  double r2 = 0;
  int used = 0;                // points above the floor entering the fit
  bool reliable = false;
};

// <W(x2) W(x2 + d)^dag> - <W(x2)><W(x2 + d)^dag> for non-contractible loops.
cd wilson_wilson_correlation(const PepsParameters& p, const Geometry& g, int x2, int separation,
                             const TransferLimits& limits = {});
CorrelationFit wilson_correlation_decay(const PepsParameters& p, int L1, int max_sep, int buffer = 2,
                                        const TransferLimits& limits = {}, double floor = 1e-13);

}  // namespace gp

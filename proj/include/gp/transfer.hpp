#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "gp/gauge.hpp"
#include "gp/observable_spec.hpp"

namespace gp {

// Cylinder of circumference L1 (periodic x1) and L2 rows.  The bottom d and
// top u virtual modes are closed with X_i and X_f: the vacuum for zero flux,
// otherwise |f| sites (from x1 = 0) with a single u+ (f > 0) or u- mode.
struct Geometry {
  int L1 = 4;
  int L2 = 8;
  int boundary_flux = 0;
};

// Per-site offset flux(ket u) - flux(bra u) of a virtual-row density operator.
using Pattern = std::vector<int>;

// Double-layer configurations (ket, bra) of a site's u modes with a given
// offset; a config c holds n_{u+} in bit 0 and n_{u-} in bit 1.
const std::vector<std::pair<int, int>>& pair_space(int offset);
inline int config_flux(int c) { return (c & 1) - (c >> 1); }

// Density operator on the virtual u modes of one row, restricted to one
// offset pattern (the transfer operator maps every other pattern to zero
// unless an insertion on the row shifts it).  Index: row-major over sites of
// pair_space(pattern[x]).
struct SectorState {
  Pattern pattern;
  VecC data;

  int L1() const { return static_cast<int>(pattern.size()); }
};

SectorState zero_state(const Pattern& pattern);
SectorState boundary_state(int L1, int flux);
std::pair<int, int> sector_flux(const Pattern& pattern, Eigen::Index index);
// (flux ket, flux bra) -> block of the state with every other entry zeroed.
std::map<std::pair<int, int>, VecC> flux_blocks(const SectorState& s);
SectorState project_flux(const SectorState& s, int flux_ket, int flux_bra);
// tr[X_f X]
cd close_state(const SectorState& s, int flux);

// Row-local observable: the operator elements of one row with the
// reordering sign of the full observable already folded into `scale`.
struct RowInsertion {
  std::vector<PathElement> elements;
  cd scale = 1.0;
};

struct TransferOperator;

// Matrix-free row map.  `row` fixes the staggering; an insertion turns T into
// the observable-inserted row map.
struct TransferOperator {
  PepsParameters params;
  int L1 = 0;
  int row = 0;
  std::optional<RowInsertion> insertion;

  struct SiteTensor;
  std::vector<std::shared_ptr<const SiteTensor>> sites;
  Pattern input_pattern, output_pattern;

  SectorState apply(const SectorState& x) const;
};

struct TransferLimits {
  int max_L1 = 6;
};

TransferOperator build_transfer(const PepsParameters& p, int L1, int row = 0,
                                const std::optional<RowInsertion>& insertion = std::nullopt,
                                const TransferLimits& limits = {});

// Dense matrix of the row map on one input pattern (test sizes only).
MatC dense_transfer(const TransferOperator& tm);

// Splits an observable into row insertions, sorted bottom to top, with the
// sign of bringing its odd elements into descending JW order.
std::map<int, RowInsertion> split_rows(const ObservableSpec& spec, int L1);

struct SpectrumOptions {
  int n_eigs = 2;
  double tol = 1e-8;
  int max_iter = 2000;
  int krylov_dim = 30;
  // Restrict to the (flux, flux) block; meaningful at t = 0 only.
  std::optional<int> flux;
};

struct Spectrum {
  std::vector<cd> eigenvalues;  // descending magnitude, lambda_1 = 1
  cd lambda1;                   // unnormalised leading eigenvalue per row
  double gap = 0;               // 1 - |lambda_2| / |lambda_1|
  int iterations = 0;
  double residual = 0;
};

// Dominant spectrum of the row transfer operator.  For t > 0 the even and
// odd rows differ and the two-row product is used; its eigenvalues are
// reported per row (principal square roots).
Spectrum dominant_spectrum(const PepsParameters& p, int L1, const SpectrumOptions& opt = {},
                           const TransferLimits& limits = {});

// Generic restarted Arnoldi for the largest-magnitude eigenvalues of a
// matrix-free map.
using LinearMap = std::function<VecC(const VecC&)>;
struct ArnoldiResult {
  std::vector<cd> values;
  std::vector<VecC> vectors;
  int iterations = 0;
  double residual = 0;
};
ArnoldiResult krylov_schur(const LinearMap& op, const VecC& start, int n_eigs, double tol,
                           int max_iter, int krylov_dim);

// tr[X_f T^(L2 - ...) T_O ... X_i] / tr[X_f T^L2 X_i] on the cylinder.
cd expectation(const PepsParameters& p, const Geometry& g, const ObservableSpec& spec,
               const TransferLimits& limits = {});

// Several observables sharing one geometry (the denominator chain is reused).
std::vector<cd> expectations(const PepsParameters& p, const Geometry& g,
                             const std::vector<ObservableSpec>& specs,
                             const TransferLimits& limits = {});

}  // namespace gp

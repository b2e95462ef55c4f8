#include <cmath>

#include "gp/errors.hpp"
#include "gp/transfer.hpp"

namespace gp {

std::string to_string(ObservableKind k) {
  switch (k) {
    case ObservableKind::Identity: return "identity";
    case ObservableKind::WilsonLoop: return "wilson";
    case ObservableKind::NonContractibleWilson: return "wilson_nc";
    case ObservableKind::ThooftLoop: return "thooft";
    case ObservableKind::NonContractibleThooft: return "thooft_nc";
    case ObservableKind::MesonString: return "meson";
    case ObservableKind::TunnelString: return "tunnel";
    case ObservableKind::FieldProduct: return "field_product";
  }
  return "?";
}

std::string to_string(OpTag t) {
  switch (t) {
    case OpTag::SigmaPlus: return "S+";
    case OpTag::SigmaMinus: return "S-";
    case OpTag::Sigma: return "S";
    case OpTag::Phase: return "exp";
    case OpTag::Create: return "psi+";
    case OpTag::Annihilate: return "psi";
    case OpTag::Number: return "n";
  }
  return "?";
}

std::map<int, RowInsertion> split_rows(const ObservableSpec& spec, int L1) {
  std::map<int, RowInsertion> rows;
  std::vector<int> jw;
  for (const PathElement& e : spec.path) {
    const bool matter = e.slot == Slot::Psi;
    const bool matter_tag = e.tag == OpTag::Create || e.tag == OpTag::Annihilate || e.tag == OpTag::Number;
    if (matter != matter_tag) throw ParameterError("operator tag does not fit its slot");
    PathElement n = e;
    n.x1 = ((e.x1 % L1) + L1) % L1;
    rows[e.x2].elements.push_back(n);
    if (matter && is_odd(e.tag)) jw.push_back(e.x2 * L1 + n.x1);
  }
  // Bring the odd elements into descending mode order; equal modes keep
  // their relative order.
  int swaps = 0;
  for (std::size_t i = 0; i < jw.size(); ++i)
    for (std::size_t j = i + 1; j < jw.size(); ++j)
      if (jw[i] < jw[j]) ++swaps;
  if (!rows.empty() && (swaps & 1)) rows.begin()->second.scale = -1.0;
  return rows;
}

namespace {

struct Chain {
  std::vector<SectorState> before;  // state entering row y, rescaled
  std::vector<double> scale;        // norm removed after row y
  cd closed;
};

}  // namespace

std::vector<cd> expectations(const PepsParameters& p, const Geometry& g,
                             const std::vector<ObservableSpec>& specs,
                             const TransferLimits& limits) {
  if (g.L2 < 1) throw GeometryError("the cylinder needs at least one row");
  const std::array<TransferOperator, 2> bare = {build_transfer(p, g.L1, 0, std::nullopt, limits),
                                                build_transfer(p, g.L1, 1, std::nullopt, limits)};
  Chain den;
  SectorState x = boundary_state(g.L1, g.boundary_flux);
  for (int y = 0; y < g.L2; ++y) {
    den.before.push_back(x);
    x = bare[y & 1].apply(x);
    const double n = x.data.norm();
    if (!(n > 0)) throw NumericalFloorError("the norm of the cylinder state vanishes");
    x.data /= n;
    den.scale.push_back(n);
  }
  den.closed = close_state(x, g.boundary_flux);
  if (std::abs(den.closed) == 0.0) throw NumericalFloorError("the norm of the cylinder state vanishes");

  std::vector<cd> out;
  out.reserve(specs.size());
  for (const ObservableSpec& spec : specs) {
    const auto rows = split_rows(spec, g.L1);
    if (rows.empty()) {
      out.push_back(1.0);
      continue;
    }
    if (rows.begin()->first < 0 || rows.rbegin()->first >= g.L2)
      throw GeometryError("observable outside the cylinder");
    const int y0 = rows.begin()->first;
    SectorState s = den.before[y0];
    bool dead = false;
    for (int y = y0; y < g.L2 && !dead; ++y) {
      auto it = rows.find(y);
      if (it == rows.end()) {
        s = bare[y & 1].apply(s);
      } else {
        const TransferOperator tm = build_transfer(p, g.L1, y, it->second, limits);
        s = tm.apply(s);
      }
      s.data /= den.scale[y];
      if (s.data.isZero(0.0)) dead = true;
    }
    out.push_back(dead ? cd(0.0) : close_state(s, g.boundary_flux) / den.closed);
  }
  return out;
}

cd expectation(const PepsParameters& p, const Geometry& g, const ObservableSpec& spec,
               const TransferLimits& limits) {
  return expectations(p, g, {spec}, limits).front();
}

}  // namespace gp

#include "gp/transfer.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "gp/errors.hpp"

namespace gp {

namespace {

using Mat3 = Eigen::Matrix3cd;
using Mat2 = Eigen::Matrix2cd;

const std::array<std::string, 9> kWorkOrder = {"d+", "d-", "l-", "l+", "psi", "u+", "u-", "r+", "r-"};

int popcount2(int c) { return (c & 1) + (c >> 1 & 1); }
int par(int c) { return popcount2(c) & 1; }
double sgn(int bit) { return (bit & 1) ? -1.0 : 1.0; }

// Key of a site configuration: d | l << 2 | n << 4 | u << 5 | r << 7.
int site_key(int d, int l, int n, int u, int r) { return d | l << 2 | n << 4 | u << 5 | r << 7; }

// Fiducial amplitudes in the working order, one table per sublattice.
std::array<cd, 512> site_amplitudes(const PepsParameters& p, Parity parity) {
  const VecC v = gauged_fiducial(p, parity);
  const auto& order = fiducial_mode_order(parity);
  std::array<int, 9> pos{};
  for (int j = 0; j < 9; ++j)
    pos[j] = static_cast<int>(std::find(kWorkOrder.begin(), kWorkOrder.end(), order[j]) - kWorkOrder.begin());
  std::array<cd, 512> out{};
  for (int i = 0; i < kLocalDim; ++i) {
    if (v(i) == 0.0) continue;
    const unsigned f = local_fbits(i);
    int inv = 0;
    for (int a = 0; a < 9; ++a) {
      if (!(f >> a & 1u)) continue;
      for (int b = a + 1; b < 9; ++b)
        if ((f >> b & 1u) && pos[a] > pos[b]) ++inv;
    }
    auto occ = [&](const char* label) {
      const int j = static_cast<int>(std::find(order.begin(), order.end(), label) - order.begin());
      return static_cast<int>(f >> j & 1u);
    };
    const int d = occ("d+") | occ("d-") << 1;
    const int l = occ("l+") | occ("l-") << 1;
    const int u = occ("u+") | occ("u-") << 1;
    const int r = occ("r+") | occ("r-") << 1;
    out[site_key(d, l, occ("psi"), u, r)] += v(i) * sgn(inv);
  }
  return out;
}

// Level difference bra - ket of a homogeneous link operator.
int link_shift(const Mat3& m) {
  std::optional<int> shift;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      if (std::abs(m(r, c)) == 0.0) continue;
      const int s = c - r;  // level(r) - level(c)
      if (shift && *shift != s) throw ParameterError("link operator mixes flux offsets");
      shift = s;
    }
  return shift.value_or(0);
}

int fermion_shift(const Mat2& m) {
  std::optional<int> shift;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      if (std::abs(m(r, c)) == 0.0) continue;
      const int s = r - c;  // n_bra - n_ket
      if (shift && *shift != s) throw ParameterError("matter operator mixes parities");
      shift = s;
    }
  return shift.value_or(0);
}

Mat3 link_matrix(const PathElement& e) {
  const LinkSpace& ls = LinkSpace::get();
  switch (e.tag) {
    case OpTag::SigmaPlus: return ls.SigmaPlus.cast<cd>();
    case OpTag::SigmaMinus: return ls.SigmaMinus.cast<cd>();
    case OpTag::Sigma: return ls.Sigma.cast<cd>();
    case OpTag::Phase: return LinkSpace::phase(e.q);
    default: throw ParameterError("matter tag on a link slot");
  }
}

Mat2 fermion_matrix(const PathElement& e) {
  Mat2 m = Mat2::Zero();
  switch (e.tag) {
    case OpTag::Create: m(1, 0) = 1; break;
    case OpTag::Annihilate: m(0, 1) = 1; break;
    case OpTag::Number: m(1, 1) = 1; break;
    default: throw ParameterError("link tag on the matter slot");
  }
  return m;
}

struct SiteOps {
  Mat2 psi = Mat2::Identity();
  Mat3 s = Mat3::Identity();
  Mat3 t = Mat3::Identity();
  int off_r = 0, off_u = 0;  // flux(ket) - flux(bra)
  int dn = 0;                // n_ket - n_bra
};

std::vector<SiteOps> site_ops(const std::optional<RowInsertion>& ins, int L1, int row) {
  std::vector<SiteOps> ops(L1);
  if (!ins) return ops;
  for (const PathElement& e : ins->elements) {
    if (e.x2 != row) throw GeometryError("insertion element outside its row");
    SiteOps& o = ops[((e.x1 % L1) + L1) % L1];
    if (e.slot == Slot::Psi) o.psi = o.psi * fermion_matrix(e);
    else if (e.slot == Slot::S) o.s = o.s * link_matrix(e);
    else o.t = o.t * link_matrix(e);
  }
  for (SiteOps& o : ops) {
    o.off_r = -link_shift(o.s);
    o.off_u = -link_shift(o.t);
    o.dn = -fermion_shift(o.psi);
  }
  return ops;
}

using PairList = std::vector<std::pair<int, int>>;

const PairList& pairs_checked(int offset) {
  const PairList& p = pair_space(offset);
  if (p.empty()) throw ParameterError("no virtual configurations carry this flux offset");
  return p;
}

}  // namespace

const std::vector<std::pair<int, int>>& pair_space(int offset) {
  static const std::array<PairList, 5> spaces = {
      PairList{{2, 1}},
      PairList{{0, 1}, {3, 1}, {2, 0}, {2, 3}},
      PairList{{0, 0}, {0, 3}, {3, 0}, {3, 3}, {1, 1}, {2, 2}},
      PairList{{1, 0}, {1, 3}, {0, 2}, {3, 2}},
      PairList{{1, 2}},
  };
  static const PairList empty;
  if (offset < -2 || offset > 2) return empty;
  return spaces[offset + 2];
}

struct TransferOperator::SiteTensor {
  int B = 0, I = 0, U = 0, Bp = 0;
  // W[variant] : (B * I) x (U * B'), variant = 2 * pw_bra + o_bra
  std::array<MatC, 4> W;
  Eigen::VectorXi u_bra_parity;  // per output pair
  Eigen::VectorXi l_bra_parity;  // per input bond pair
};

namespace {

Eigen::Index state_size(const Pattern& pattern) {
  Eigen::Index n = 1;
  for (int off : pattern) n *= static_cast<Eigen::Index>(pairs_checked(off).size());
  return n;
}

}  // namespace

SectorState zero_state(const Pattern& pattern) {
  SectorState s;
  s.pattern = pattern;
  s.data = VecC::Zero(state_size(pattern));
  return s;
}

namespace {

// Index in pair_space(0) of (c, c) for the boundary configs.
Eigen::Index boundary_index(int L1, int flux) {
  if (std::abs(flux) > L1) throw GeometryError("boundary flux exceeds the row width");
  const PairList& p0 = pair_space(0);
  auto find = [&](int c) {
    return static_cast<int>(std::find(p0.begin(), p0.end(), std::make_pair(c, c)) - p0.begin());
  };
  const int occ = find(flux > 0 ? 1 : 2), vac = find(0);
  Eigen::Index idx = 0;
  for (int x = 0; x < L1; ++x) idx = idx * 6 + (x < std::abs(flux) ? occ : vac);
  return idx;
}

}  // namespace

SectorState boundary_state(int L1, int flux) {
  SectorState s = zero_state(Pattern(L1, 0));
  s.data(boundary_index(L1, flux)) = 1.0;
  return s;
}

std::pair<int, int> sector_flux(const Pattern& pattern, Eigen::Index index) {
  int fk = 0, fb = 0;
  for (int x = static_cast<int>(pattern.size()) - 1; x >= 0; --x) {
    const PairList& p = pair_space(pattern[x]);
    const auto n = static_cast<Eigen::Index>(p.size());
    const auto& [k, b] = p[index % n];
    index /= n;
    fk += config_flux(k);
    fb += config_flux(b);
  }
  return {fk, fb};
}

std::map<std::pair<int, int>, VecC> flux_blocks(const SectorState& s) {
  std::map<std::pair<int, int>, VecC> out;
  for (Eigen::Index i = 0; i < s.data.size(); ++i) {
    if (s.data(i) == 0.0) continue;
    auto key = sector_flux(s.pattern, i);
    auto it = out.find(key);
    if (it == out.end()) it = out.emplace(key, VecC::Zero(s.data.size())).first;
    it->second(i) = s.data(i);
  }
  return out;
}

SectorState project_flux(const SectorState& s, int flux_ket, int flux_bra) {
  SectorState r = s;
  for (Eigen::Index i = 0; i < r.data.size(); ++i)
    if (sector_flux(s.pattern, i) != std::make_pair(flux_ket, flux_bra)) r.data(i) = 0.0;
  return r;
}

cd close_state(const SectorState& s, int flux) {
  for (int off : s.pattern)
    if (off != 0) return 0.0;
  return s.data(boundary_index(s.L1(), flux));
}

TransferOperator build_transfer(const PepsParameters& p, int L1, int row,
                                const std::optional<RowInsertion>& insertion,
                                const TransferLimits& limits) {
  if (L1 < 2) throw GeometryError("the row needs at least two sites");
  if (L1 > limits.max_L1) {
    const double est = std::pow(6.0, L1) * 16.0 * 8.0;
    throw ResourceError("row width above the configured maximum", est);
  }
  if (L1 % 2 == 1 && p.t != 0.0)
    throw StaggeringError("odd circumference breaks the staggering unless t = 0");

  TransferOperator tm;
  tm.params = p;
  tm.L1 = L1;
  tm.row = row;
  tm.insertion = insertion;

  const std::vector<SiteOps> ops = site_ops(insertion, L1, row);
  const std::array<std::array<cd, 512>, 2> amp = {site_amplitudes(p, Parity::Even),
                                                  site_amplitudes(p, Parity::Odd)};

  int m_odd = 0;
  for (const SiteOps& o : ops) m_odd += std::abs(o.dn) & 1;
  const int wrap_eps = ops[L1 - 1].off_r & 1;

  tm.input_pattern.resize(L1);
  tm.output_pattern.resize(L1);
  for (int x = 0; x < L1; ++x) {
    const int prev = ops[(x + L1 - 1) % L1].off_r;
    tm.output_pattern[x] = ops[x].off_u;
    tm.input_pattern[x] = ops[x].off_r + ops[x].off_u - prev - vertex_sign(x, row) * ops[x].dn;
  }

  int odd_after = m_odd;
  int out_par = 0;  // parity of offsets of the outputs before x
  for (int x = 0; x < L1; ++x) {
    const SiteOps& o = ops[x];
    odd_after -= std::abs(o.dn) & 1;
    const auto& F = amp[vertex_parity(x, row) == Parity::Even ? 0 : 1];
    const PairList& pl = pairs_checked(ops[(x + L1 - 1) % L1].off_r);
    const PairList& pd = pairs_checked(tm.input_pattern[x]);
    const PairList& pu = pairs_checked(o.off_u);
    const PairList& pr = pairs_checked(o.off_r);

    auto st = std::make_shared<TransferOperator::SiteTensor>();
    st->B = static_cast<int>(pl.size());
    st->I = static_cast<int>(pd.size());
    st->U = static_cast<int>(pu.size());
    st->Bp = static_cast<int>(pr.size());
    st->u_bra_parity.resize(st->U);
    for (int u = 0; u < st->U; ++u) st->u_bra_parity(u) = par(pu[u].second);
    st->l_bra_parity.resize(st->B);
    for (int b = 0; b < st->B; ++b) st->l_bra_parity(b) = par(pl[b].second);
    const bool internal = x < L1 - 1;
    const cd scale = (x == 0 && insertion) ? insertion->scale : cd(1.0);

    for (int var = 0; var < 4; ++var) {
      const int pwb = var >> 1, ob = var & 1;
      const int pwk = pwb ^ wrap_eps, ok = ob ^ out_par;
      const int ak = pwk ^ ok, ab = pwb ^ ob;
      MatC& Wv = st->W[var];
      Wv = MatC::Zero(st->B * st->I, st->U * st->Bp);
      for (int b = 0; b < st->B; ++b)
        for (int i = 0; i < st->I; ++i)
          for (int u = 0; u < st->U; ++u)
            for (int bp = 0; bp < st->Bp; ++bp) {
              const auto [lk, lb] = pl[b];
              const auto [dk, db] = pd[i];
              const auto [uk, ub] = pu[u];
              const auto [rk, rb] = pr[bp];
              const cd ws = o.s(LinkSpace::index(config_flux(rb)), LinkSpace::index(config_flux(rk)));
              const cd wt = o.t(LinkSpace::index(config_flux(ub)), LinkSpace::index(config_flux(uk)));
              if (ws == 0.0 || wt == 0.0) continue;
              cd acc = 0;
              for (int nk = 0; nk < 2; ++nk)
                for (int nb = 0; nb < 2; ++nb) {
                  const cd wp = o.psi(nb, nk);
                  if (wp == 0.0) continue;
                  const cd fk = F[site_key(dk, lk, nk, uk, rk)];
                  const cd fb = F[site_key(db, lb, nb, ub, rb)];
                  if (fk == 0.0 || fb == 0.0) continue;
                  int s = 0;
                  s += (dk == 3) + (db == 3);
                  if (internal) s += popcount2(rk) + popcount2(rb);
                  s += m_odd * par(db);
                  s += nb * odd_after;
                  s += ak * nk + ab * nb;
                  s += pwk * par(uk) + pwb * par(ub);
                  acc += fk * std::conj(fb) * wp * sgn(s);
                }
              Wv(b * st->I + i, u * st->Bp + bp) = acc * ws * wt * scale;
            }
    }
    out_par ^= o.off_u & 1;
    tm.sites.push_back(std::move(st));
  }
  return tm;
}

SectorState TransferOperator::apply(const SectorState& x) const {
  if (x.pattern != input_pattern) return zero_state(output_pattern);
  const int L = L1;
  // The bra output parity only enters through odd matter insertions.
  bool track_o = false;
  if (insertion)
    for (const PathElement& e : insertion->elements)
      if (e.slot == Slot::Psi && is_odd(e.tag)) track_o = true;
  const int no = track_o ? 2 : 1;
  const SiteTensor& s0 = *sites[0];
  const int Bw = s0.B;

  // Layout [w][o][b][i_x][i_{x+1}..][outs]; per (w, o) a column-major
  // R x (B * I) block with R = rest * outs.
  Eigen::Index outs = 1;
  Eigen::Index rest = x.data.size() / s0.I;
  std::vector<cd> cur, next;
  SectorState result = zero_state(output_pattern);
  MatC tmp;

  for (int xs = 0; xs < L; ++xs) {
    const SiteTensor& st = *sites[xs];
    const Eigen::Index R = rest * outs;
    const bool last = xs == L - 1;
    const Eigen::Index B = xs == 0 ? 1 : st.B;
    const Eigen::Index blk_in = B * st.I * R;
    const Eigen::Index RU = R * st.U;
    const Eigen::Index blk_out = st.Bp * RU;
    if (!last) next.assign(static_cast<std::size_t>(Bw * no * blk_out), cd(0.0));

    for (int w = 0; w < Bw; ++w) {
      const int pwb = s0.l_bra_parity(w);
      for (int o = 0; o < no; ++o) {
        if (xs == 0 && o != 0) continue;
        const cd* src = xs == 0 ? x.data.data() : cur.data() + (w * no + o) * blk_in;
        Eigen::Map<const MatC> in(src, R, B * st.I);
        const MatC& W = st.W[2 * pwb + o];
        if (xs == 0) tmp.noalias() = in * W.middleRows(w * st.I, st.I);
        else tmp.noalias() = in * W;
        if (last) {
          for (int u = 0; u < st.U; ++u) {
            const auto col = tmp.col(u * st.Bp + w);
            for (Eigen::Index r = 0; r < R; ++r) result.data(r * st.U + u) += col(r);
          }
          continue;
        }
        for (int u = 0; u < st.U; ++u) {
          const int o2 = track_o ? o ^ st.u_bra_parity(u) : 0;
          cd* dst = next.data() + (w * no + o2) * blk_out;
          for (int bp = 0; bp < st.Bp; ++bp) {
            const auto col = tmp.col(u * st.Bp + bp);
            cd* d = dst + bp * RU + u;
            for (Eigen::Index r = 0; r < R; ++r) d[r * st.U] = col(r);
          }
        }
      }
    }
    if (!last) {
      cur.swap(next);
      rest /= sites[xs + 1]->I;
      outs *= st.U;
    }
  }
  return result;
}

MatC dense_transfer(const TransferOperator& tm) {
  SectorState e = zero_state(tm.input_pattern);
  const Eigen::Index n = e.data.size();
  const Eigen::Index m = zero_state(tm.output_pattern).data.size();
  MatC out(m, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    e.data.setZero();
    e.data(j) = 1.0;
    out.col(j) = tm.apply(e).data;
  }
  return out;
}

}  // namespace gp

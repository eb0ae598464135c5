#include "tiling/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <queue>
#include <set>

#include "tiling/height.hpp"
#include "tiling/hexgraph.hpp"
#include "tiling/ust.hpp"

namespace tiling::shape {

using hex::HexCoord;

int FGField::find_white(const HexCoord& w) const {
  auto it = white_index.find(hex_key(w));
  return it == white_index.end() ? -1 : it->second;
}

int FGField::find_black(const HexCoord& b) const {
  auto it = black_index.find(hex_key(b));
  return it == black_index.end() ? -1 : it->second;
}

namespace {

const std::array<std::array<int, 2>, 6> kSteps{{{1, 0}, {1, 1}, {0, 1}, {-1, 0}, {-1, -1}, {0, -1}}};

// Lattice range covering a box at mesh delta.
struct Range {
  int64_t m0, m1, n0, n1;
};
Range lattice_range(cplx lo, cplx hi, double delta) {
  const double s = kSqrt3 / 2;
  Range r;
  r.m0 = static_cast<int64_t>(std::floor(lo.real() / delta / s)) - 2;
  r.m1 = static_cast<int64_t>(std::ceil(hi.real() / delta / s)) + 2;
  r.n0 = static_cast<int64_t>(std::floor(lo.imag() / delta + std::min(r.m0, r.m1) / 2.0)) - 3;
  r.n1 = static_cast<int64_t>(std::ceil(hi.imag() / delta + std::max(r.m0, r.m1) / 2.0)) + 3;
  return r;
}

// Uniform bucket grid over points or segments.
class SpatialHash {
 public:
  explicit SpatialHash(double cell) : cell_(cell) {}
  void insert_box(cplx a, cplx b, int id) {
    auto [i0, j0] = key(cplx(std::min(a.real(), b.real()), std::min(a.imag(), b.imag())));
    auto [i1, j1] = key(cplx(std::max(a.real(), b.real()), std::max(a.imag(), b.imag())));
    for (int64_t i = i0; i <= i1; ++i)
      for (int64_t j = j0; j <= j1; ++j) cells_[hex_key(i, j)].push_back(id);
  }
  // Ids in the cells meeting the box [a, b] grown by r.
  std::vector<int> query(cplx a, cplx b, double r) const {
    auto [i0, j0] = key(cplx(std::min(a.real(), b.real()) - r, std::min(a.imag(), b.imag()) - r));
    auto [i1, j1] = key(cplx(std::max(a.real(), b.real()) + r, std::max(a.imag(), b.imag()) + r));
    std::vector<int> out;
    for (int64_t i = i0; i <= i1; ++i)
      for (int64_t j = j0; j <= j1; ++j) {
        auto it = cells_.find(hex_key(i, j));
        if (it != cells_.end()) out.insert(out.end(), it->second.begin(), it->second.end());
      }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

 private:
  std::pair<int64_t, int64_t> key(cplx z) const {
    return {static_cast<int64_t>(std::floor(z.real() / cell_)), static_cast<int64_t>(std::floor(z.imag() / cell_))};
  }
  double cell_;
  std::unordered_map<uint64_t, std::vector<int>> cells_;
};

int orient(cplx a, cplx b, cplx c) {
  const double x = cross(b - a, c - a);
  return (x > 0) - (x < 0);
}

bool on_segment(cplx a, cplx b, cplx p) {
  return std::min(a.real(), b.real()) <= p.real() && p.real() <= std::max(a.real(), b.real()) &&
         std::min(a.imag(), b.imag()) <= p.imag() && p.imag() <= std::max(a.imag(), b.imag());
}

// Closed segments [a,b] and [c,d] share a point.
bool segments_meet(cplx a, cplx b, cplx c, cplx d) {
  const int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

// Conjugate gradients for A A^* z = r with A given row-wise; returns y = A^* z.
struct RowSystem {
  std::vector<std::array<int, 3>> col;
  std::vector<std::array<cplx, 3>> a;
  std::vector<cplx> rhs;
  int ncols = 0;
};

std::vector<cplx> min_norm_solve(const RowSystem& s, double tol, int max_iter, int& iterations) {
  const size_t nr = s.rhs.size();
  auto adjoint = [&](const std::vector<cplx>& z) {
    std::vector<cplx> y(s.ncols, 0.0);
    for (size_t r = 0; r < nr; ++r)
      for (int k = 0; k < 3; ++k) y[s.col[r][k]] += std::conj(s.a[r][k]) * z[r];
    return y;
  };
  auto apply = [&](const std::vector<cplx>& z) {
    std::vector<cplx> y = adjoint(z), out(nr, 0.0);
    for (size_t r = 0; r < nr; ++r)
      for (int k = 0; k < 3; ++k) out[r] += s.a[r][k] * y[s.col[r][k]];
    return out;
  };
  auto norm2 = [](const std::vector<cplx>& v) {
    double t = 0;
    for (auto& x : v) t += std::norm(x);
    return t;
  };
  std::vector<cplx> z(nr, 0.0), r = s.rhs, p = r;
  double rr = norm2(r);
  const double stop = tol * tol * std::max(norm2(s.rhs), 1e-300);
  iterations = 0;
  while (rr > stop && iterations < max_iter) {
    const std::vector<cplx> Ap = apply(p);
    double pAp = 0;
    for (size_t k = 0; k < nr; ++k) pAp += std::real(std::conj(p[k]) * Ap[k]);
    if (!(pAp > 0)) break;
    const double alpha = rr / pAp;
    for (size_t k = 0; k < nr; ++k) {
      z[k] += alpha * p[k];
      r[k] -= alpha * Ap[k];
    }
    const double rn = norm2(r);
    for (size_t k = 0; k < nr; ++k) p[k] = r[k] + (rn / rr) * p[k];
    rr = rn;
    ++iterations;
  }
  if (rr > stop) throw Error("NoConvergence", "projection did not converge");
  return adjoint(z);
}

}  // namespace

FGField build_FG_discrete(const LimitShape& s, double delta, int NM, double radius) {
  if (!s.analytic) throw Error("Unsupported", "limit shape without analytic data");
  if (NM < 0 || NM > 1) throw Error("Unsupported", "only N_M <= 1 is available");
  if (NM == 1 && s.M_plus.empty()) throw Error("Unsupported", "limit shape was built without M1");
  const TestShape& t = *s.analytic;
  FGField fg;
  fg.delta = delta;
  fg.NM = NM;
  fg.radius = radius;
  cplx lo, hi;
  t.bounding_box(radius, lo, hi);
  const Range R = lattice_range(lo, hi, delta);
  const cplx p_center = t.dphi_dy(t.center());
  auto half_log = [&](cplx p) {
    return 0.5 * cplx(std::log(std::abs(p)), std::arg(p_center) + std::arg(p / p_center));
  };
  auto M1 = [&](cplx u) { return NM == 1 ? s.M_plus[0].interpolate(u) : cplx(0); };

  // Per white position: (phi, H, half log p), shared by F(w) and G at the black right of w.
  struct Local {
    bool ok = false;
    cplx phi, H, hl;
  };
  std::unordered_map<uint64_t, Local> cache;
  auto local = [&](const HexCoord& w) -> const Local& {
    auto [it, fresh] = cache.try_emplace(hex_key(w));
    if (fresh) {
      const cplx z = hex::plane_position(w, delta);
      try {
        const cplx zeta = t.zeta(z);
        it->second.phi = t.phi_of_zeta(zeta);
        if (std::abs(it->second.phi) < radius + 4 * delta * std::abs(t.dphi_dz(t.center())) + 0.05) {
          it->second.H = t.H(z);
          it->second.hl = half_log(t.dphi_dy(z));
          it->second.ok = true;
        }
      } catch (const Error&) {
      }
    }
    return it->second;
  };

  for (int64_t m = R.m0; m <= R.m1; ++m)
    for (int64_t n = R.n0; n <= R.n1; ++n) {
      const HexCoord w = hex::white(m, n);
      const cplx zw = hex::plane_position(w, delta);
      if (zw.real() < lo.real() - 2 * delta || zw.real() > hi.real() + 2 * delta || zw.imag() < lo.imag() - 2 * delta ||
          zw.imag() > hi.imag() + 2 * delta)
        continue;
      cplx phiw;
      try {
        phiw = t.phi(zw);
      } catch (const Error&) {
        continue;
      }
      if (std::abs(phiw) < radius) {
        const Local& L = local(w);
        if (L.ok) {
          fg.white_index[hex_key(w)] = static_cast<int>(fg.whites.size());
          fg.whites.push_back(w);
          fg.white_pos.push_back(zw);
          fg.white_phi.push_back(L.phi);
          fg.logF.push_back(-L.H / delta + L.hl + std::log(1.0 + delta * M1(L.phi)));
        }
      }
      const HexCoord b = hex::black(m, n);
      const cplx zb = hex::plane_position(b, delta);
      cplx phib;
      try {
        phib = t.phi(zb);
      } catch (const Error&) {
        continue;
      }
      if (std::abs(phib) < radius) {
        const Local& L = local(w);
        if (!L.ok) continue;
        fg.black_index[hex_key(b)] = static_cast<int>(fg.blacks.size());
        fg.blacks.push_back(b);
        fg.black_pos.push_back(zb);
        fg.black_phi.push_back(phib);
        fg.logG.push_back(L.H / delta + L.hl + std::log(1.0 - delta * M1(L.phi)));
      }
    }
  return fg;
}

DefectReport black_defect(const FGField& fg, double interior_radius) {
  DefectReport r;
  for (size_t b = 0; b < fg.blacks.size(); ++b) {
    if (std::abs(fg.black_phi[b]) > interior_radius) continue;
    cplx sum = 0;
    bool full = true;
    for (auto& w : hex::white_neighbors(fg.blacks[b])) {
      const int wi = fg.find_white(w);
      if (wi < 0) {
        full = false;
        break;
      }
      sum += fg.product(static_cast<int>(b), wi);
    }
    if (!full) continue;
    ++r.count;
    r.sup = std::max(r.sup, std::abs(sum));
  }
  return r;
}

DefectReport white_defect(const FGField& fg, double interior_radius) {
  DefectReport r;
  for (size_t w = 0; w < fg.whites.size(); ++w) {
    if (std::abs(fg.white_phi[w]) > interior_radius) continue;
    cplx sum = 0;
    bool full = true;
    for (auto& b : hex::black_neighbors(fg.whites[w])) {
      const int bi = fg.find_black(b);
      if (bi < 0) {
        full = false;
        break;
      }
      sum += fg.product(bi, static_cast<int>(w));
    }
    if (!full) continue;
    ++r.count;
    r.sup = std::max(r.sup, std::abs(sum));
  }
  return r;
}

ProjectionReport project_discrete_holomorphic(FGField& fg, double tol, int max_iter) {
  ProjectionReport rep;
  // F at blacks with three whites
  {
    RowSystem s;
    s.ncols = static_cast<int>(fg.whites.size());
    for (size_t b = 0; b < fg.blacks.size(); ++b) {
      std::array<int, 3> c;
      bool full = true;
      auto nb = hex::white_neighbors(fg.blacks[b]);
      for (int k = 0; k < 3 && full; ++k) full = (c[k] = fg.find_white(nb[k])) >= 0;
      if (!full) continue;
      std::array<cplx, 3> a;
      cplx sum = 0;
      for (int k = 0; k < 3; ++k) sum += a[k] = fg.product(static_cast<int>(b), c[k]);
      s.col.push_back(c);
      s.a.push_back(a);
      s.rhs.push_back(-sum);
    }
    int it = 0;
    const std::vector<cplx> y = min_norm_solve(s, tol, max_iter, it);
    rep.iterations += it;
    for (size_t w = 0; w < y.size(); ++w) {
      rep.max_rel_change_F = std::max(rep.max_rel_change_F, std::abs(y[w]));
      fg.logF[w] += std::log(1.0 + y[w]);
    }
  }
  // G at whites with three blacks
  {
    RowSystem s;
    s.ncols = static_cast<int>(fg.blacks.size());
    for (size_t w = 0; w < fg.whites.size(); ++w) {
      std::array<int, 3> c;
      bool full = true;
      auto nb = hex::black_neighbors(fg.whites[w]);
      for (int k = 0; k < 3 && full; ++k) full = (c[k] = fg.find_black(nb[k])) >= 0;
      if (!full) continue;
      std::array<cplx, 3> a;
      cplx sum = 0;
      for (int k = 0; k < 3; ++k) sum += a[k] = fg.product(c[k], static_cast<int>(w));
      s.col.push_back(c);
      s.a.push_back(a);
      s.rhs.push_back(-sum);
    }
    int it = 0;
    const std::vector<cplx> y = min_norm_solve(s, tol, max_iter, it);
    rep.iterations += it;
    for (size_t b = 0; b < y.size(); ++b) {
      rep.max_rel_change_G = std::max(rep.max_rel_change_G, std::abs(y[b]));
      fg.logG[b] += std::log(1.0 + y[b]);
    }
  }
  rep.defect_after = std::max(black_defect(fg, 1e300).sup, white_defect(fg, 1e300).sup);
  return rep;
}

LambdaChoice choose_lambda(const std::vector<double>& arguments) {
  if (arguments.empty()) throw Error("NoMargin", "no arguments");
  std::vector<double> th;
  for (double a : arguments) {
    double x = std::fmod(a, kPi);
    if (x < 0) x += kPi;
    if (x >= kPi) x -= kPi;
    th.push_back(x);
  }
  std::sort(th.begin(), th.end());
  const size_t n = th.size();
  double gmax = 0;
  std::vector<double> gap(n);
  for (size_t i = 0; i < n; ++i) {
    gap[i] = (i + 1 < n ? th[i + 1] : th[0] + kPi) - th[i];
    gmax = std::max(gmax, gap[i]);
  }
  double best_alpha = 10;
  for (size_t i = 0; i < n; ++i) {
    if (gap[i] < gmax - 1e-12) continue;
    double alpha = kPi / 2 - (th[i] + gap[i] / 2);
    while (alpha > kPi / 2) alpha -= kPi;
    while (alpha <= -kPi / 2) alpha += kPi;
    best_alpha = std::min(best_alpha, alpha);
  }
  LambdaChoice c;
  c.lambda = std::polar(1.0, best_alpha);
  c.margin = 1;
  for (double a : arguments) c.margin = std::min(c.margin, std::abs(std::cos(a + best_alpha)));
  if (c.margin < 1e-15) throw Error("NoMargin", "lambda F(w) is imaginary for some w");
  return c;
}

LambdaChoice choose_lambda(const FGField& fg) {
  std::vector<double> args;
  args.reserve(fg.logF.size());
  for (auto& l : fg.logF) args.push_back(l.imag());
  return choose_lambda(args);
}

cplx omega(const FGField& fg, int w, int b, cplx lambda) {
  const cplx lf = fg.logF[w], lg = fg.logG[b];
  const double al = std::arg(lambda);
  return 2 * fg.delta * std::cos(lf.imag() + al) * std::exp(lf.real() + lg.real()) * std::polar(1.0, lg.imag() - al);
}

namespace {
// Increment of psi along v -> v + step, or nullopt if the crossed edge is missing.
std::optional<cplx> psi_step(const FGField& fg, cplx lambda, const HexCoord& v, int dm, int dn) {
  const hex::Crossing c = hex::dual_crossing(v, dm, dn);
  const int w = fg.find_white(c.w), b = fg.find_black(c.b);
  if (w < 0 || b < 0) return std::nullopt;
  return static_cast<double>(c.sign) * omega(fg, w, b, lambda);
}
}  // namespace

PsiMap build_psi(const FGField& fg, cplx lambda, const TestShape& t) {
  PsiMap psi;
  psi.delta = fg.delta;
  psi.lambda = lambda;
  psi.root = cut::nearest_dual(t.center(), fg.delta);
  const cplx z0 = hex::plane_position(psi.root, fg.delta);
  psi.value[hex_key(psi.root)] = t.phi(z0);
  psi.coord[hex_key(psi.root)] = psi.root;
  std::queue<HexCoord> q;
  q.push(psi.root);
  while (!q.empty()) {
    const HexCoord v = q.front();
    q.pop();
    const cplx pv = psi.value.at(hex_key(v));
    for (auto [dm, dn] : kSteps) {
      const auto inc = psi_step(fg, lambda, v, dm, dn);
      if (!inc) continue;
      const HexCoord u = hex::dual(v.m + dm, v.n + dn);
      auto it = psi.value.find(hex_key(u));
      if (it == psi.value.end()) {
        psi.value[hex_key(u)] = pv + *inc;
        psi.coord[hex_key(u)] = u;
        q.push(u);
      } else {
        psi.tree_residual = std::max(psi.tree_residual, std::abs(it->second - pv - *inc));
      }
    }
  }
  if (psi.value.size() < 2) throw Error("OutOfRange", "no dual edge around the center");
  // closed loops around single vertices
  auto loop = [&](const std::array<HexCoord, 3>& corners) {
    cplx sum = 0;
    for (int k = 0; k < 3; ++k) {
      const HexCoord& a = corners[k];
      const HexCoord& b = corners[(k + 1) % 3];
      const auto inc = psi_step(fg, lambda, a, static_cast<int>(b.m - a.m), static_cast<int>(b.n - a.n));
      if (!inc) return;
      sum += *inc;
    }
    psi.face_residual = std::max(psi.face_residual, std::abs(sum));
  };
  for (auto& w : fg.whites) loop(hex::white_face(w));
  for (auto& b : fg.blacks) loop(hex::black_face(b));
  return psi;
}

PsiAudit audit_psi(const PsiMap& psi, const FGField& fg, const TestShape& t) {
  PsiAudit a;
  a.min_white_margin = 1e300;
  std::vector<std::vector<cplx>> tris;
  for (auto& w : fg.whites) {
    auto f = hex::white_face(w);
    if (!psi.has(f[0]) || !psi.has(f[1]) || !psi.has(f[2])) continue;
    const cplx z0 = psi.at(f[0]), z1 = psi.at(f[1]), z2 = psi.at(f[2]);
    ++a.whites;
    const double cr = cross(z1 - z0, z2 - z0);
    const double side = std::max({std::norm(z1 - z0), std::norm(z2 - z1), std::norm(z0 - z2)});
    a.min_white_margin = std::min(a.min_white_margin, side > 0 ? cr / side : 0.0);
    if (cr > 0) {
      ++a.positive_whites;
      tris.push_back({z0, z1, z2});
      a.total_white_area += cr / 2;
    }
  }
  if (a.whites == 0) a.min_white_margin = 0;

  // overlaps between white triangles
  double cell = 0;
  for (auto& tr : tris) cell = std::max(cell, std::abs(tr[1] - tr[0]) + std::abs(tr[2] - tr[0]));
  if (!tris.empty()) {
    SpatialHash sh(std::max(cell, 1e-300));
    for (size_t i = 0; i < tris.size(); ++i) {
      cplx lo = tris[i][0], hi = tris[i][0];
      for (auto& z : tris[i]) {
        lo = {std::min(lo.real(), z.real()), std::min(lo.imag(), z.imag())};
        hi = {std::max(hi.real(), z.real()), std::max(hi.imag(), z.imag())};
      }
      for (int j : sh.query(lo, hi, 0))
        a.overlap_area += planar::convex_overlap(tris[i], tris[static_cast<size_t>(j)]);
      sh.insert_box(lo, hi, static_cast<int>(i));
    }
  }

  // black triangles: flatness; middle corners
  std::unordered_map<uint64_t, int> middle_count;
  for (auto& b : fg.blacks) {
    auto f = hex::black_face(b);
    if (!psi.has(f[0]) || !psi.has(f[1]) || !psi.has(f[2])) continue;
    ++a.blacks;
    std::array<cplx, 3> z{psi.at(f[0]), psi.at(f[1]), psi.at(f[2])};
    std::array<double, 3> l{std::abs(z[1] - z[2]), std::abs(z[2] - z[0]), std::abs(z[0] - z[1])};
    const double per = l[0] + l[1] + l[2];
    const double area = std::abs(cross(z[1] - z[0], z[2] - z[0])) / 2;
    const double shortest = std::min({l[0], l[1], l[2]});
    if (shortest > 0) a.worst_flatness = std::max(a.worst_flatness, (4 * area / per) / shortest);
    // the middle corner is opposite the longest side
    const int mid = static_cast<int>(std::max_element(l.begin(), l.end()) - l.begin());
    middle_count[hex_key(f[mid])]++;
  }
  for (auto& [k, v] : psi.coord) {
    auto ring = hex::face_ring(v);
    bool full = true;
    for (auto& b : ring.blacks) {
      auto f = hex::black_face(b);
      full = full && fg.find_black(b) >= 0 && psi.has(f[0]) && psi.has(f[1]) && psi.has(f[2]);
    }
    if (!full) continue;
    auto it = middle_count.find(k);
    const int c = it == middle_count.end() ? 0 : it->second;
    if (c == 1) ++a.interior_of_one;
    else ++a.unclassified;
  }

  // vertex separation and distance to phi
  double sep_cell = 0;
  for (auto& [k, v] : psi.coord) {
    for (auto [dm, dn] : kSteps) {
      auto it = psi.value.find(hex_key(v.m + dm, v.n + dn));
      if (it != psi.value.end()) sep_cell = std::max(sep_cell, std::abs(it->second - psi.value.at(k)));
    }
    a.max_psi_phi = std::max(a.max_psi_phi, std::abs(psi.value.at(k) - t.phi(hex::plane_position(v, psi.delta))));
  }
  a.min_vertex_separation = 1e300;
  SpatialHash sh(std::max(sep_cell, 1e-300));
  std::vector<cplx> pts;
  for (auto& [k, z] : psi.value) {
    for (int j : sh.query(z, z, sep_cell)) a.min_vertex_separation = std::min(a.min_vertex_separation, std::abs(z - pts[j]));
    sh.insert_box(z, z, static_cast<int>(pts.size()));
    pts.push_back(z);
  }
  return a;
}

Correction correct_to_tgraph(const PsiMap& psi, const FGField& fg, const CorrectionParams& params) {
  struct Seg {
    HexCoord b;
    std::array<HexCoord, 2> end_label;
    std::array<cplx, 2> s1;   // extremal chord
    std::array<cplx, 2> cur;  // current ends
  };
  std::vector<Seg> segs;
  double thick = 0, longest = 0;
  for (auto& b : fg.blacks) {
    auto f = hex::black_face(b);
    if (!psi.has(f[0]) || !psi.has(f[1]) || !psi.has(f[2])) continue;
    std::array<cplx, 3> z{psi.at(f[0]), psi.at(f[1]), psi.at(f[2])};
    int ia = 0, ib = 1;
    double best = -1;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        if (std::abs(z[i] - z[j]) > best) {
          best = std::abs(z[i] - z[j]);
          ia = i;
          ib = j;
        }
    if (!(best > 0)) continue;
    const int ic = 3 - ia - ib;
    thick = std::max(thick, std::abs(cross(z[ib] - z[ia], z[ic] - z[ia])) / best);
    longest = std::max(longest, best);
    segs.push_back({b, {f[ia], f[ib]}, {z[ia], z[ib]}, {z[ia], z[ib]}});
  }
  if (segs.empty()) throw Error("Empty", "no black triangle in the psi image");

  Correction out;
  const double eps = params.eps_short > 0 ? params.eps_short : std::max(100 * thick, 1e-9 * fg.delta);
  out.eps_short = eps;
  const int ns = static_cast<int>(segs.size());
  for (auto& s : segs) {
    const cplx d = (s.s1[1] - s.s1[0]) / std::abs(s.s1[1] - s.s1[0]);
    if (2 * eps >= std::abs(s.s1[1] - s.s1[0])) throw Error("OverlapAfterShortening", "eps_short exceeds half a chord");
    s.cur = {s.s1[0] + eps * d, s.s1[1] - eps * d};
  }

  // shortened segments must be disjoint
  SpatialHash sh(std::max(longest, 1e-300));
  for (int i = 0; i < ns; ++i) sh.insert_box(segs[i].cur[0], segs[i].cur[1], i);
  for (int i = 0; i < ns; ++i)
    for (int j : sh.query(segs[i].cur[0], segs[i].cur[1], 0))
      if (j > i && segments_meet(segs[i].cur[0], segs[i].cur[1], segs[j].cur[0], segs[j].cur[1]))
        throw Error("OverlapAfterShortening", "blacks " + std::to_string(segs[i].b.m) + "," +
                                                  std::to_string(segs[i].b.n) + " and " +
                                                  std::to_string(segs[j].b.m) + "," + std::to_string(segs[j].b.n));

  // regrowth order
  std::vector<int> order;
  if (params.order.empty()) {
    order.resize(ns);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) {
      return std::make_pair(segs[x].b.n, segs[x].b.m) < std::make_pair(segs[y].b.n, segs[y].b.m);
    });
  } else {
    std::unordered_map<uint64_t, int> idx;
    for (int i = 0; i < ns; ++i) idx[hex_key(segs[i].b)] = i;
    std::vector<char> used(ns, 0);
    for (auto& b : params.order) {
      auto it = idx.find(hex_key(b));
      if (it != idx.end() && !used[it->second]) {
        order.push_back(it->second);
        used[it->second] = 1;
      }
    }
    for (int i = 0; i < ns; ++i)
      if (!used[i]) order.push_back(i);
  }

  // ends: host segment (or -1) and position
  struct End {
    int host = -1;
    cplx pos;
  };
  std::vector<std::array<End, 2>> ends(ns);
  // ends meeting the same host closer than rounding are one vertex; rays passing a tip that close
  // are not stopped by it
  double scale = 0;
  for (auto& s : segs) scale = std::max({scale, std::abs(s.s1[0]), std::abs(s.s1[1])});
  const double merge_tol = std::max(1e-6 * eps, 1e-13 * scale);
  // ends with the same dual label meeting a host this close are the same corner of psi
  const double snap_tol = std::max(0.01 * eps, merge_tol);
  const double cap = params.max_regrow_factor * eps;
  for (int i : order) {
    for (int e = 0; e < 2; ++e) {
      const cplx o = segs[i].cur[e];
      const cplx d = (segs[i].s1[e] - segs[i].s1[1 - e]) / std::abs(segs[i].s1[e] - segs[i].s1[1 - e]);
      double best = cap;
      int host = -1;
      // boxes were registered before regrowth, which moves ends by at most cap
      for (int j : sh.query(o, o + cap * d, cap)) {
        if (j == i) continue;
        const cplx a = segs[j].cur[0], b = segs[j].cur[1];
        const cplx ab = b - a;
        const double den = cross(d, ab);
        if (den == 0) continue;
        const double s = cross(a - o, ab) / den;  // distance along the ray
        const double r = cross(a - o, d) / den;   // parameter along [a, b]
        if (s < 0 || s > best) continue;
        const double lab = std::abs(ab);
        if (r * lab <= merge_tol || (1 - r) * lab <= merge_tol) continue;
        best = s;
        host = j;
      }
      ends[i][e].host = host;
      if (host >= 0) {
        ends[i][e].pos = o + best * d;
        out.max_regrow = std::max(out.max_regrow, best);
      } else {
        ends[i][e].pos = o;
      }
    }
    segs[i].cur = {ends[i][0].pos, ends[i][1].pos};
  }

  // assembly with pruning
  std::vector<char> kept(ns, 1);
  TGraph g;
  for (int iter = 0; iter < 1000; ++iter) {
    std::vector<int> seg_ids;
    for (int i = 0; i < ns; ++i)
      if (kept[i]) seg_ids.push_back(i);
    std::vector<int> pos_in(ns, -1);
    for (size_t k = 0; k < seg_ids.size(); ++k) pos_in[seg_ids[k]] = static_cast<int>(k);

    g = TGraph();
    std::vector<std::array<int, 2>> end_vertex(ns, {-1, -1});
    // hosted ends, grouped per host along the host direction
    std::vector<std::vector<std::pair<double, std::pair<int, int>>>> hosted(ns);
    out.merged_label_conflicts = 0;
    bool snapped = false;
    for (int i : seg_ids)
      for (int e = 0; e < 2; ++e) {
        const int h = ends[i][e].host;
        if (h >= 0 && kept[h]) {
          const cplx a = segs[h].cur[0], d = segs[h].cur[1] - a;
          hosted[h].push_back({dot(ends[i][e].pos - a, d) / std::norm(d), {i, e}});
        } else {
          end_vertex[i][e] = static_cast<int>(g.points.size());
          g.points.push_back(ends[i][e].pos);
          g.boundary.push_back(1);
          g.vertex_label.push_back(segs[i].end_label[e]);
        }
      }
    std::vector<std::vector<int>> interior(ns);
    for (int h : seg_ids) {
      auto& L = hosted[h];
      std::sort(L.begin(), L.end());
      const double len = std::abs(segs[h].cur[1] - segs[h].cur[0]);
      for (size_t k = 0; k < L.size(); ++k) {
        auto [i, e] = L[k].second;
        bool merge = false;
        if (k > 0) {
          auto [pi, pe] = L[k - 1].second;
          const double gap = (L[k].first - L[k - 1].first) * len;
          const bool same = *g.vertex_label[end_vertex[pi][pe]] == segs[i].end_label[e];
          merge = gap <= merge_tol || (same && gap <= snap_tol);
          if (merge) {
            end_vertex[i][e] = end_vertex[pi][pe];
            if (!same) ++out.merged_label_conflicts;
            if (gap > merge_tol) snapped = true;
            continue;
          }
        }
        end_vertex[i][e] = static_cast<int>(g.points.size());
        g.points.push_back(ends[i][e].pos);
        g.boundary.push_back(0);
        g.vertex_label.push_back(segs[i].end_label[e]);
        interior[h].push_back(end_vertex[i][e]);
      }
    }
    for (int i : seg_ids) {
      std::vector<int> sv{end_vertex[i][0]};
      sv.insert(sv.end(), interior[i].begin(), interior[i].end());
      sv.push_back(end_vertex[i][1]);
      g.segments.push_back(sv);
      g.segment_label.push_back(segs[i].b);
    }
    g.eps_geom = snapped ? snap_tol : merge_tol;
    g.finalize();

    std::set<int> drop;
    Arrangement arr = build_faces(g);
    std::vector<char> on_outer(g.num_vertices(), 0);
    for (int x : arr.outer.cycle) on_outer[x] = 1;
    for (int x = 0; x < g.num_vertices(); ++x) {
      if (!g.boundary[x] || on_outer[x]) continue;
      for (auto [s, p] : g.incidences(x)) drop.insert(seg_ids[s]);
    }
    if (drop.empty()) {
      std::vector<int> comp(g.num_vertices());
      std::iota(comp.begin(), comp.end(), 0);
      std::function<int(int)> find = [&](int a) { return comp[a] == a ? a : comp[a] = find(comp[a]); };
      for (int q = 0; q < g.num_pieces(); ++q) {
        auto [a, b] = g.piece_ends(q);
        comp[find(a)] = find(b);
      }
      std::map<int, int> size;
      for (int s = 0; s < g.num_segments(); ++s) size[find(g.segments[s][0])]++;
      int best = -1, bsz = -1;
      for (auto& [c, sz] : size)
        if (sz > bsz) {
          best = c;
          bsz = sz;
        }
      for (int s = 0; s < g.num_segments(); ++s)
        if (find(g.segments[s][0]) != best) drop.insert(seg_ids[s]);
    }
    if (drop.empty()) break;
    out.pruned_segments += static_cast<int>(drop.size());
    for (int i : drop) kept[i] = 0;
  }

  // piece classification
  g.piece_short.assign(g.num_pieces(), 0);
  out.min_long = 1e300;
  for (int p = 0; p < g.num_pieces(); ++p) {
    const double l = g.piece_length(p);
    if (l <= params.short_factor * eps) {
      g.piece_short[p] = 1;
      ++out.short_pieces;
      out.max_short = std::max(out.max_short, l);
    } else {
      out.min_long = std::min(out.min_long, l);
    }
  }
  if (out.min_long == 1e300) out.min_long = 0;
  for (int s = 0; s < g.num_segments(); ++s) {
    bool interior = true;
    for (int x : g.segments[s]) interior = interior && !g.boundary[x];
    if (!interior) continue;
    ++out.interior_segments;
    int nlong = 0, nshort = 0;
    bool adjacent = false;
    const int k = static_cast<int>(g.segments[s].size()) - 1;
    for (int q = 0; q < k; ++q) {
      const bool sh_q = g.piece_short[g.piece_offset(s) + q];
      (sh_q ? nshort : nlong)++;
      if (sh_q && q > 0 && g.piece_short[g.piece_offset(s) + q - 1]) adjacent = true;
    }
    if (nlong == 2 && nshort <= 3 && !adjacent) ++out.regular_segments;
  }
  out.graph = std::move(g);
  return out;
}

HexLabeling identify_hex_subgraph(const TGraph& g, const Arrangement& arr) {
  HexLabeling lab;
  lab.face_white = cut::label_faces_by_corners(g, arr);
  lab.faces = static_cast<int>(arr.faces.size());
  std::unordered_map<uint64_t, int> seen;
  std::set<uint64_t> segs;
  for (auto& l : g.segment_label)
    if (l) segs.insert(hex_key(*l));
  for (int f = 0; f < lab.faces; ++f) {
    if (!lab.face_white[f]) continue;
    ++lab.labeled;
    const HexCoord w = *lab.face_white[f];
    if (!seen.emplace(hex_key(w), f).second) lab.inverse_consistent = false;
    bool full = true;
    for (auto& b : hex::black_neighbors(w)) full = full && segs.count(hex_key(b)) > 0;
    if (full) ++lab.full_faces;
  }
  return lab;
}

FaceProducts face_weight_products(const TGraph& g, const Arrangement& arr, const HexLabeling& lab) {
  FaceProducts fp;
  const DimerGraph dg = to_dimer_graph(g, arr);
  std::unordered_map<uint64_t, int> seg_of, face_of;
  for (int s = 0; s < g.num_segments(); ++s)
    if (g.segment_label[s]) seg_of[hex_key(*g.segment_label[s])] = s;
  for (size_t f = 0; f < lab.face_white.size(); ++f)
    if (lab.face_white[f]) face_of[hex_key(*lab.face_white[f])] = static_cast<int>(f);
  std::set<uint64_t> done;
  for (auto& l : g.vertex_label) {
    if (!l || !done.insert(hex_key(*l)).second) continue;
    const auto ring = hex::face_ring(*l);
    std::array<int, 3> bs, ws;
    bool ok = true;
    for (int i = 0; i < 3 && ok; ++i) {
      auto bi = seg_of.find(hex_key(ring.blacks[i]));
      auto wi = face_of.find(hex_key(ring.whites[i]));
      ok = bi != seg_of.end() && wi != face_of.end();
      if (ok) {
        bs[i] = bi->second;
        ws[i] = wi->second;
      }
    }
    if (!ok) continue;
    double prod = 1;
    for (int i = 0; i < 3 && ok; ++i) {
      const double num = dg.weight(bs[i], ws[i]), den = dg.weight(bs[i], ws[(i + 2) % 3]);
      ok = num > 0 && den > 0;
      prod *= ok ? num / den : 1;
    }
    if (!ok) continue;
    ++fp.faces;
    fp.values.push_back(prod);
    fp.max_dev = std::max(fp.max_dev, std::abs(prod - 1));
  }
  return fp;
}

Pipeline run_pipeline(const LimitShape& s, double delta, const PipelineOptions& opt) {
  Pipeline p;
  p.fg = build_FG_discrete(s, delta, opt.NM);
  p.defect = black_defect(p.fg, 0.8);
  if (opt.project) p.projection = project_discrete_holomorphic(p.fg);
  p.lambda = choose_lambda(p.fg);
  p.psi = build_psi(p.fg, p.lambda.lambda, *s.analytic);
  p.audit = audit_psi(p.psi, p.fg, *s.analytic);
  p.correction = correct_to_tgraph(p.psi, p.fg, opt.correction);
  p.arr = build_faces(p.correction.graph);
  p.labels = identify_hex_subgraph(p.correction.graph, p.arr);
  return p;
}

CurvedCut curved_cut_domain(const Pipeline& p, const TestShape& t, double u_radius, uint64_t seed,
                            double width_factor) {
  const double delta = p.fg.delta;
  const TGraph& g = p.correction.graph;
  CurvedCut cc;
  // lattice curve bounding U
  const int npts = std::max(256, static_cast<int>(16 * kPi * u_radius / (delta * std::abs(t.dphi_dz(t.center())))));
  std::vector<cplx> curve(npts);
  for (int k = 0; k < npts; ++k) curve[k] = t.phi_inverse(std::polar(u_radius, 2 * kPi * k / npts));
  double maxlen = 0;
  for (int s = 0; s < g.num_segments(); ++s) maxlen = std::max(maxlen, g.segment_length(s));
  cut::DualMap image(p.psi.value.begin(), p.psi.value.end());
  cc.corridor = cut::corridor_from_lattice_curve(image, delta, curve, width_factor * maxlen, t.center());
  cc.cut = cut::cut_domain(g, cc.corridor, seed);
  if (!cc.cut.labeled) throw Error("LabelMismatch", "cut domain without lattice labels");
  const HexSubgraph& U = cc.cut.u_hex;
  cc.simply_connected = simply_connected(U);

  // Hausdorff distance between the closed faces of U_hex and U
  auto dist_to_curve = [&](cplx z) {
    double d = 1e300;
    for (int k = 0; k < npts; ++k) {
      const cplx a = curve[k], b = curve[(k + 1) % npts], ab = b - a;
      const double r = std::clamp(dot(z - a, ab) / std::norm(ab), 0.0, 1.0);
      d = std::min(d, std::abs(z - a - r * ab));
    }
    return d;
  };
  auto in_U = [&](cplx z) {
    try {
      return std::abs(t.phi(z)) <= u_radius;
    } catch (const Error&) {
      return false;
    }
  };
  std::vector<cplx> corner_pts;
  std::set<uint64_t> covered;
  for (auto& v : U.interior_faces()) {
    covered.insert(hex_key(v));
    auto ring = hex::face_ring(v);
    for (int i = 0; i < 3; ++i) {
      corner_pts.push_back(hex::plane_position(ring.blacks[i], delta));
      corner_pts.push_back(hex::plane_position(ring.whites[i], delta));
    }
  }
  double d1 = 0;
  for (auto& z : corner_pts)
    if (!in_U(z)) d1 = std::max(d1, dist_to_curve(z));
  double d2 = 0;
  {
    SpatialHash sh(delta);
    for (size_t k = 0; k < corner_pts.size(); ++k) sh.insert_box(corner_pts[k], corner_pts[k], static_cast<int>(k));
    cplx lo, hi;
    t.bounding_box(u_radius, lo, hi);
    const double step = delta / 2;
    for (double x = lo.real(); x <= hi.real(); x += step)
      for (double y = lo.imag(); y <= hi.imag(); y += step) {
        const cplx z(x, y);
        if (!in_U(z)) continue;
        if (covered.count(hex_key(cut::nearest_dual(z, delta)))) continue;
        double d = 1e300;
        for (double r = delta; d == 1e300; r *= 2)
          for (int k : sh.query(z, z, r)) d = std::min(d, std::abs(z - corner_pts[k]));
        d2 = std::max(d2, d);
      }
  }
  cc.hausdorff = std::max(d1, d2);

  // boundary heights from one matching against h^C
  const ust::SpanningTree tree = ust::wilson_sample(cc.cut.gamma, seed, 0);
  const HexMatching m = cut::hex_matching(cc.cut, tree);
  cc.matchable = is_perfect(U, m);
  if (cc.matchable) {
    const HexHeight h = height_from_matching(U, m);
    std::set<uint64_t> inner;
    for (auto& v : U.interior_faces()) inner.insert(hex_key(v));
    double lo = 1e300, hi = -1e300;
    for (auto& v : U.faces()) {
      if (inner.count(hex_key(v)) || !h.has(v)) continue;
      const double d = delta * h.value(v) - t.height(hex::plane_position(v, delta));
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    cc.boundary_deviation = hi >= lo ? (hi - lo) / 2 : 0;
  }
  return cc;
}

}  // namespace tiling::shape

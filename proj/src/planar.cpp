#include "tiling/planar.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <unordered_map>

namespace tiling::planar {

using hex::HexCoord;

void PlanarParams::check() const {
  const double scale = max_side();
  if (std::abs(A - B) == 0 || std::abs(B - C) == 0 || std::abs(C - A) == 0)
    throw Error("Flat", "triangle has repeated vertices");
  const double area2 = cross(B - A, C - A);
  if (std::abs(area2) <= 1e-12 * scale * scale) throw Error("Flat", "triangle vertices are aligned");
  if (area2 < 0) throw Error("Orientation", "triangle must be in positive order");
  if (std::abs(std::abs(lambda) - 1) > 1e-12) throw Error("Lambda", "lambda must have unit modulus");
}

double PlanarParams::max_side() const { return std::max({std::abs(A - B), std::abs(B - C), std::abs(C - A)}); }

namespace {
cplx log_r1(const PlanarParams& p) { return std::log((p.A - p.C) / (p.C - p.B)); }
cplx log_r2(const PlanarParams& p) { return std::log((p.B - p.A) / (p.A - p.C)); }
}  // namespace

LogPolar log_F(const PlanarParams& p, int64_t m, int64_t n) {
  const cplx l1 = log_r1(p), l2 = log_r2(p);
  const double dm = static_cast<double>(m), dn = static_cast<double>(n);
  return {dm * l1.real() + dn * l2.real(), dm * l1.imag() + dn * l2.imag()};
}

LogPolar log_G(const PlanarParams& p, int64_t m, int64_t n) {
  const cplx l0 = std::log(p.C - p.B);
  auto f = log_F(p, m, n);
  return {l0.real() - f.logmod, l0.imag() - f.arg};
}

cplx eval_FG(const PlanarParams& p, const HexCoord& c) {
  if (c.role == hex::Role::White) return log_F(p, c.m, c.n).value();
  if (c.role == hex::Role::Black) return log_G(p, c.m, c.n).value();
  throw Error("Role", "F and G live on whites and blacks");
}

cplx omega(const PlanarParams& p, const HexCoord& w, const HexCoord& b) {
  if (!hex::kasteleyn_entry(w, b)) return 0;
  const auto f = log_F(p, w.m, w.n);
  const auto g = log_G(p, b.m, b.n);
  const double al = std::arg(p.lambda);
  return 2 * std::cos(f.arg + al) * std::exp(f.logmod + g.logmod) * std::polar(1.0, g.arg - al);
}

cplx dual_increment(const PlanarParams& p, const HexCoord& v, int dm, int dn) {
  auto c = hex::dual_crossing(v, dm, dn);
  return static_cast<double>(c.sign) * omega(p, c.w, c.b);
}

bool Window::contains(cplx z) const {
  const cplx d = z - center;
  if (kind == Kind::Disk) return std::abs(d) <= radius;
  return std::abs(d.real()) <= half_w && std::abs(d.imag()) <= half_h;
}

std::array<cplx, 3> white_triangle(const Patch& patch, const HexCoord& w) {
  auto f = hex::white_face(w);
  std::array<cplx, 3> out;
  for (int i = 0; i < 3; ++i) out[i] = patch.T.at({f[i].m, f[i].n});
  return out;
}

namespace {
using Key = std::pair<int64_t, int64_t>;

struct Dsu {
  std::vector<int> p;
  int add() {
    p.push_back(static_cast<int>(p.size()));
    return p.back();
  }
  int find(int x) { return p[x] == x ? x : p[x] = find(p[x]); }
  void unite(int a, int b) { p[find(a)] = find(b); }
};
}  // namespace

Patch build_whole_plane_patch(const PlanarParams& p0, const Window& window, double mesh, const PatchOptions& opt) {
  p0.check();
  if (!(mesh > 0)) throw Error("Mesh", "mesh must be positive");
  Patch out;
  out.params = p0;
  out.mesh = mesh;
  PlanarParams& p = out.params;

  // Dual box covering the window through the linear drift, padded for the O(1) term.
  const cplx u = p.B - p.A, v = p.C - p.B;
  const double det = cross(u, v);
  double ext = window.kind == Window::Kind::Disk ? window.radius : std::hypot(window.half_w, window.half_h);
  double mmin = 1e300, mmax = -1e300, nmin = 1e300, nmax = -1e300;
  for (int sx : {-1, 1})
    for (int sy : {-1, 1}) {
      const cplx z = (window.center + cplx(sx * ext, sy * ext)) / mesh;
      const double m = cross(z, v) / det, n = cross(u, z) / det;
      mmin = std::min(mmin, m);
      mmax = std::max(mmax, m);
      nmin = std::min(nmin, n);
      nmax = std::max(nmax, n);
    }
  const double minside = std::min({std::abs(u), std::abs(v), std::abs(p.A - p.C)});
  const int64_t pad = 4 + static_cast<int64_t>(std::ceil(2 * p.max_side() / minside));
  const int64_t m0 = static_cast<int64_t>(std::floor(mmin)) - pad, m1 = static_cast<int64_t>(std::ceil(mmax)) + pad;
  const int64_t n0 = static_cast<int64_t>(std::floor(nmin)) - pad, n1 = static_cast<int64_t>(std::ceil(nmax)) + pad;

  const double degen_diam = opt.eps_degen * p.max_side();
  auto white_diam = [&](int64_t m, int64_t n) {
    return 2 * std::abs(std::cos(log_F(p, m, n).arg + std::arg(p.lambda))) * p.max_side();
  };
  if (opt.perturb_lambda) {
    bool hit = false;
    for (int64_t m = m0; m <= m1 && !hit; ++m)
      for (int64_t n = n0; n <= n1 && !hit; ++n) hit = white_diam(m, n) < degen_diam;
    if (hit) p.lambda *= std::polar(1.0, 1e-6);
  }

  // T along the m axis, then up each column.
  std::map<Key, cplx> T;
  {
    const int64_t ma = std::min<int64_t>(m0, 0), mb = std::max<int64_t>(m1, 0);
    std::map<int64_t, cplx> axis;
    axis[0] = 0;
    for (int64_t m = 0; m < mb; ++m) axis[m + 1] = axis[m] + dual_increment(p, hex::dual(m, 0), 1, 0);
    for (int64_t m = 0; m > ma; --m) axis[m - 1] = axis[m] + dual_increment(p, hex::dual(m, 0), -1, 0);
    for (int64_t m = m0; m <= m1; ++m) {
      cplx t = axis[m];
      std::map<int64_t, cplx> col;
      col[0] = t;
      const int64_t na = std::min<int64_t>(n0, 0), nb = std::max<int64_t>(n1, 0);
      for (int64_t n = 0; n < nb; ++n) col[n + 1] = col[n] + dual_increment(p, hex::dual(m, n), 0, 1);
      for (int64_t n = 0; n > na; --n) col[n - 1] = col[n] + dual_increment(p, hex::dual(m, n), 0, -1);
      for (int64_t n = n0; n <= n1; ++n) T[{m, n}] = col[n];
    }
  }
  for (auto& [k, t] : T) t *= mesh;
  out.T = T;

  // Vertex identification: corners of collapsed whites are merged.
  std::map<Key, int> vid;
  Dsu dsu;
  for (auto& [k, t] : T) vid[k] = dsu.add();
  for (int64_t m = m0; m <= m1; ++m)
    for (int64_t n = n0; n <= n1; ++n) {
      auto f = hex::white_face(hex::white(m, n));
      bool all = true;
      for (auto& c : f) all &= T.count({c.m, c.n}) > 0;
      if (!all || white_diam(m, n) >= degen_diam) continue;
      out.degenerate_whites.push_back(hex::white(m, n));
      dsu.unite(vid[{f[0].m, f[0].n}], vid[{f[1].m, f[1].n}]);
      dsu.unite(vid[{f[0].m, f[0].n}], vid[{f[2].m, f[2].n}]);
    }

  // Candidate blacks: all three corners inside the window.
  struct Seg {
    HexCoord b;
    std::vector<int> verts;  // dsu roots, ends first/last
  };
  std::map<Key, Seg> segs;
  for (int64_t m = m0; m <= m1; ++m)
    for (int64_t n = n0; n <= n1; ++n) {
      auto f = hex::black_face(hex::black(m, n));
      bool ok = true;
      for (auto& c : f) ok &= T.count({c.m, c.n}) && window.contains(T[{c.m, c.n}]);
      if (!ok) continue;
      std::array<int, 3> r;
      std::array<cplx, 3> z;
      for (int i = 0; i < 3; ++i) {
        r[i] = dsu.find(vid[{f[i].m, f[i].n}]);
        z[i] = T[{f[i].m, f[i].n}];
      }
      // ends are the farthest pair
      int ia = 0, ib = 1;
      double best = -1;
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
          if (r[i] != r[j] && std::abs(z[i] - z[j]) > best) {
            best = std::abs(z[i] - z[j]);
            ia = i;
            ib = j;
          }
      if (best <= 0) continue;
      const int ic = 3 - ia - ib;
      Seg s{hex::black(m, n), {r[ia]}};
      if (r[ic] != r[ia] && r[ic] != r[ib]) s.verts.push_back(r[ic]);
      s.verts.push_back(r[ib]);
      segs[{m, n}] = s;
    }

  std::map<int, cplx> root_pos;
  std::map<int, Key> root_key;
  for (auto& [k, id] : vid) {
    const int r = dsu.find(id);
    if (!root_pos.count(r)) {
      root_pos[r] = T[k];
      root_key[r] = k;
    }
  }
  std::set<int> degenerate_roots;
  for (auto& w : out.degenerate_whites) {
    auto f = hex::white_face(w);
    degenerate_roots.insert(dsu.find(vid[{f[0].m, f[0].n}]));
  }

  std::set<Key> included;
  for (auto& [k, s] : segs) included.insert(k);
  TGraph g;
  for (int iter = 0; iter < 1000; ++iter) {
    // assemble
    std::map<int, int> pid;
    std::map<int, int> hosted, incident;
    for (auto& k : included) {
      const auto& s = segs[k];
      for (size_t i = 0; i < s.verts.size(); ++i) {
        if (!pid.count(s.verts[i])) pid.emplace(s.verts[i], static_cast<int>(pid.size()));
        if (i > 0 && i + 1 < s.verts.size()) hosted[s.verts[i]]++;
        else incident[s.verts[i]]++;
      }
    }
    g = TGraph();
    g.points.resize(pid.size());
    g.boundary.assign(pid.size(), 0);
    g.vertex_label.assign(pid.size(), std::nullopt);
    for (auto& [r, i] : pid) {
      g.points[i] = root_pos[r];
      g.vertex_label[i] = hex::dual(root_key[r].first, root_key[r].second);
      const bool deg = degenerate_roots.count(r) > 0;
      g.boundary[i] = deg ? incident[r] < 6 : hosted[r] == 0;
    }
    std::vector<Key> order(included.begin(), included.end());
    for (auto& k : order) {
      std::vector<int> sv;
      for (int r : segs[k].verts) sv.push_back(pid[r]);
      g.segments.push_back(sv);
      g.segment_label.push_back(segs[k].b);
    }
    g.eps_geom = 1e-9 * std::max(g.diameter(), mesh);
    g.finalize();
    if (g.num_segments() == 0) break;

    // drop segments touching enclosed boundary points, then keep the largest component
    std::set<Key> drop;
    Arrangement arr = build_faces(g);
    std::vector<char> on_outer(g.num_vertices(), 0);
    for (int x : arr.outer.cycle) on_outer[x] = 1;
    for (int x = 0; x < g.num_vertices(); ++x) {
      if (!g.boundary[x] || on_outer[x]) continue;
      for (auto [s, pos] : g.incidences(x)) drop.insert(order[s]);
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
        if (find(g.segments[s][0]) != best) drop.insert(order[s]);
    }
    if (drop.empty()) break;
    out.pruned_segments += static_cast<int>(drop.size());
    for (auto& k : drop) included.erase(k);
  }

  // collapsed whites: reference triangle sides by edge type
  const double la = std::abs(p.C - p.B), lb = std::abs(p.A - p.C), lc = std::abs(p.B - p.A);
  std::map<Key, int> seg_of;
  for (int s = 0; s < g.num_segments(); ++s) seg_of[{g.segment_label[s]->m, g.segment_label[s]->n}] = s;
  for (auto& w : out.degenerate_whites) {
    auto f = hex::white_face(w);
    const int r = dsu.find(vid[{f[0].m, f[0].n}]);
    int x = -1;
    for (int i = 0; i < g.num_vertices(); ++i)
      if (std::abs(g.points[i] - root_pos[r]) == 0) x = i;
    if (x < 0) continue;
    DegenerateGeometry dg;
    dg.vertex = x;
    auto nb = hex::black_neighbors(w);
    for (int t = 0; t < 3; ++t) {
      auto it = seg_of.find({nb[t].m, nb[t].n});
      dg.seg[t] = it == seg_of.end() ? -1 : it->second;
    }
    dg.l = {la, lb, lc};
    g.degenerate_geometry.push_back(dg);
  }

  double dev = 0;
  for (int x = 0; x < g.num_vertices(); ++x) {
    const auto& c = *g.vertex_label[x];
    const cplx lin = static_cast<double>(c.m) * u + static_cast<double>(c.n) * v;
    dev = std::max(dev, std::abs(g.points[x] / mesh - lin));
  }
  out.max_drift_deviation = dev;
  g.piece_short.assign(g.num_pieces(), 0);  // the whole-plane family has no short pieces
  out.graph = std::move(g);
  return out;
}

double convex_overlap(std::vector<cplx> P, const std::vector<cplx>& Q) {
  for (size_t i = 0; i < Q.size() && !P.empty(); ++i) {
    const cplx a = Q[i], b = Q[(i + 1) % Q.size()];
    std::vector<cplx> R;
    for (size_t j = 0; j < P.size(); ++j) {
      const cplx c = P[j], d = P[(j + 1) % P.size()];
      const double sc = cross(b - a, c - a), sd = cross(b - a, d - a);
      if (sc >= 0) R.push_back(c);
      if ((sc >= 0) != (sd >= 0)) R.push_back(c + (d - c) * (sc / (sc - sd)));
    }
    P = std::move(R);
  }
  double area = 0;
  for (size_t i = 0; i < P.size(); ++i) area += cross(P[i], P[(i + 1) % P.size()]);
  return std::max(0.0, area / 2);
}

GeometryReport geometry_report(const Patch& patch) {
  GeometryReport rep;
  rep.max_drift_deviation = patch.max_drift_deviation;
  const TGraph& g = patch.graph;
  std::set<Key> verts;
  for (int x = 0; x < g.num_vertices(); ++x) verts.insert({g.vertex_label[x]->m, g.vertex_label[x]->n});
  // whites with all corners present
  std::vector<std::vector<cplx>> tri;
  for (auto& [k, t] : patch.T) {
    auto w = hex::white(k.first, k.second);
    auto f = hex::white_face(w);
    bool ok = true;
    for (auto& c : f) ok &= verts.count({c.m, c.n}) > 0;
    if (!ok) continue;
    auto z = white_triangle(patch, w);
    std::vector<cplx> P(z.begin(), z.end());
    if (cross(P[1] - P[0], P[2] - P[0]) < 0) std::swap(P[1], P[2]);
    tri.push_back(P);
  }
  double xmin = 1e300, ymin = 1e300, xmax = -1e300, ymax = -1e300, cell = 0;
  for (auto& P : tri) {
    for (auto z : P) {
      xmin = std::min(xmin, z.real());
      xmax = std::max(xmax, z.real());
      ymin = std::min(ymin, z.imag());
      ymax = std::max(ymax, z.imag());
    }
    rep.total_white_area += std::abs(cross(P[1] - P[0], P[2] - P[0])) / 2;
  }
  cell = patch.mesh * patch.params.max_side() * 2;
  std::map<Key, std::vector<int>> grid;
  auto cx = [&](double x) { return static_cast<int64_t>(std::floor((x - xmin) / cell)); };
  auto cy = [&](double y) { return static_cast<int64_t>(std::floor((y - ymin) / cell)); };
  for (size_t i = 0; i < tri.size(); ++i) {
    double a = 1e300, b = -1e300, c = 1e300, d = -1e300;
    for (auto z : tri[i]) {
      a = std::min(a, z.real());
      b = std::max(b, z.real());
      c = std::min(c, z.imag());
      d = std::max(d, z.imag());
    }
    for (int64_t ix = cx(a); ix <= cx(b); ++ix)
      for (int64_t iy = cy(c); iy <= cy(d); ++iy) grid[{ix, iy}].push_back(static_cast<int>(i));
  }
  std::set<std::pair<int, int>> done;
  for (auto& [cellk, ids] : grid)
    for (size_t i = 0; i < ids.size(); ++i)
      for (size_t j = i + 1; j < ids.size(); ++j) {
        auto pr = std::minmax(ids[i], ids[j]);
        if (!done.insert(pr).second) continue;
        rep.overlap_area += convex_overlap(tri[pr.first], tri[pr.second]);
      }
  // local geometry at every dual vertex whose three blacks are present
  std::set<Key> blacks;
  for (int s = 0; s < g.num_segments(); ++s) blacks.insert({g.segment_label[s]->m, g.segment_label[s]->n});
  std::set<Key> collapsed;
  for (auto& w : patch.degenerate_whites)
    for (auto& c : hex::white_face(w)) collapsed.insert({c.m, c.n});
  const double tol = 1e-9 * patch.mesh * patch.params.max_side();
  for (auto& k : verts) {
    auto ring = hex::face_ring(hex::dual(k.first, k.second));
    bool all = true;
    for (auto& b : ring.blacks) all &= blacks.count({b.m, b.n}) > 0;
    if (!all) continue;
    if (collapsed.count(k)) {
      rep.endpoint_of_six++;
      continue;
    }
    int interior = 0, endpoint = 0;
    const cplx z = patch.T.at(k);
    for (auto& b : ring.blacks) {
      auto f = hex::black_face(b);
      std::array<cplx, 3> c;
      for (int i = 0; i < 3; ++i) c[i] = patch.T.at({f[i].m, f[i].n});
      double far = 0;
      cplx e0 = c[0], e1 = c[1];
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
          if (std::abs(c[i] - c[j]) > far) {
            far = std::abs(c[i] - c[j]);
            e0 = c[i];
            e1 = c[j];
          }
      if (std::abs(z - e0) <= tol || std::abs(z - e1) <= tol)
        ++endpoint;
      else
        ++interior;
    }
    if (interior == 1 && endpoint == 2)
      rep.interior_of_one++;
    else
      rep.unclassified++;
  }
  return rep;
}

}  // namespace tiling::planar

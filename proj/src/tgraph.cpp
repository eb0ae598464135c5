#include "tiling/tgraph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <unordered_map>

namespace tiling {
namespace {

struct BoxGrid {
  double x0 = 0, y0 = 0, cell = 1;
  int nx = 1, ny = 1;
  std::vector<std::vector<int>> bins;

  BoxGrid(double xmin, double ymin, double xmax, double ymax, double c) {
    cell = c > 0 ? c : 1.0;
    x0 = xmin;
    y0 = ymin;
    nx = std::max(1, std::min(4096, static_cast<int>((xmax - xmin) / cell) + 1));
    ny = std::max(1, std::min(4096, static_cast<int>((ymax - ymin) / cell) + 1));
    cell = std::max((xmax - xmin) / nx, (ymax - ymin) / ny) * 1.000001 + 1e-300;
    bins.assign(static_cast<size_t>(nx) * ny, {});
  }
  int cx(double x) const { return std::clamp(static_cast<int>((x - x0) / cell), 0, nx - 1); }
  int cy(double y) const { return std::clamp(static_cast<int>((y - y0) / cell), 0, ny - 1); }
  void insert(int id, double xa, double ya, double xb, double yb) {
    for (int i = cx(xa); i <= cx(xb); ++i)
      for (int j = cy(ya); j <= cy(yb); ++j) bins[static_cast<size_t>(i) * ny + j].push_back(id);
  }
  template <class F>
  void query(double xa, double ya, double xb, double yb, F&& f) const {
    for (int i = cx(xa); i <= cx(xb); ++i)
      for (int j = cy(ya); j <= cy(yb); ++j)
        for (int id : bins[static_cast<size_t>(i) * ny + j]) f(id);
  }
};

double seg_param(cplx a, cplx b, cplx p) { return dot(p - a, b - a) / std::norm(b - a); }

double dist_to_line(cplx a, cplx b, cplx p) { return std::abs(cross(b - a, p - a)) / std::abs(b - a); }

}  // namespace

double TGraph::diameter() const {
  if (points.empty()) return 0;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (auto p : points) {
    xmin = std::min(xmin, p.real());
    xmax = std::max(xmax, p.real());
    ymin = std::min(ymin, p.imag());
    ymax = std::max(ymax, p.imag());
  }
  return std::hypot(xmax - xmin, ymax - ymin);
}

TGraph TGraph::from_segments(const std::vector<std::pair<cplx, cplx>>& segs,
                             const std::vector<cplx>& boundary_points, double eps_rel) {
  TGraph g;
  std::vector<cplx> raw;
  for (auto& [a, b] : segs) {
    raw.push_back(a);
    raw.push_back(b);
  }
  for (auto p : boundary_points) raw.push_back(p);
  double diam = 0;
  {
    TGraph tmp;
    tmp.points = raw;
    diam = tmp.diameter();
  }
  const double eps = std::max(eps_rel * diam, 1e-300);
  g.eps_geom = eps;

  // Merge coincident endpoints on a hash grid of cell 4*eps.
  const double cell = 4 * eps;
  std::unordered_map<int64_t, std::vector<int>> hash;
  auto key = [&](int64_t i, int64_t j) { return i * 1000003LL + j; };
  auto find_or_add = [&](cplx p) {
    const int64_t i = static_cast<int64_t>(std::floor(p.real() / cell));
    const int64_t j = static_cast<int64_t>(std::floor(p.imag() / cell));
    for (int64_t di = -1; di <= 1; ++di)
      for (int64_t dj = -1; dj <= 1; ++dj) {
        auto it = hash.find(key(i + di, j + dj));
        if (it == hash.end()) continue;
        for (int v : it->second)
          if (std::abs(g.points[v] - p) <= eps) return v;
      }
    const int v = static_cast<int>(g.points.size());
    g.points.push_back(p);
    hash[key(i, j)].push_back(v);
    return v;
  };
  std::vector<std::pair<int, int>> ends;
  for (auto& [a, b] : segs) ends.emplace_back(find_or_add(a), find_or_add(b));
  std::vector<int> bverts;
  for (auto p : boundary_points) bverts.push_back(find_or_add(p));
  g.boundary.assign(g.points.size(), 0);
  for (int v : bverts) g.boundary[v] = 1;

  // Attach every vertex lying inside a segment.
  double xmin = 1e300, ymin = 1e300, xmax = -1e300, ymax = -1e300, total = 0;
  for (auto p : g.points) {
    xmin = std::min(xmin, p.real());
    ymin = std::min(ymin, p.imag());
    xmax = std::max(xmax, p.real());
    ymax = std::max(ymax, p.imag());
  }
  for (auto& [a, b] : ends) total += std::abs(g.points[a] - g.points[b]);
  const double avg = ends.empty() ? 1.0 : total / ends.size();
  BoxGrid grid(xmin, ymin, xmax, ymax, std::max(avg, eps));
  for (size_t s = 0; s < ends.size(); ++s) {
    cplx a = g.points[ends[s].first], b = g.points[ends[s].second];
    grid.insert(static_cast<int>(s), std::min(a.real(), b.real()) - eps, std::min(a.imag(), b.imag()) - eps,
                std::max(a.real(), b.real()) + eps, std::max(a.imag(), b.imag()) + eps);
  }
  std::vector<std::vector<std::pair<double, int>>> inner(ends.size());
  for (int v = 0; v < g.num_vertices(); ++v) {
    cplx p = g.points[v];
    grid.query(p.real(), p.imag(), p.real(), p.imag(), [&](int s) {
      auto [ia, ib] = ends[s];
      if (ia == v || ib == v) return;
      cplx a = g.points[ia], b = g.points[ib];
      const double len = std::abs(b - a);
      const double t = seg_param(a, b, p);
      if (t * len <= eps || (1 - t) * len <= eps) return;
      if (dist_to_line(a, b, p) > eps) return;
      for (auto& [tt, vv] : inner[s])
        if (vv == v) return;
      inner[s].emplace_back(t, v);
    });
  }
  for (size_t s = 0; s < ends.size(); ++s) {
    std::sort(inner[s].begin(), inner[s].end());
    std::vector<int> list{ends[s].first};
    for (auto& [t, v] : inner[s]) list.push_back(v);
    list.push_back(ends[s].second);
    g.segments.push_back(std::move(list));
  }
  g.finalize();
  return g;
}

void TGraph::finalize() {
  const int n = num_vertices();
  if (static_cast<int>(boundary.size()) != n) boundary.resize(n, 0);
  host_.assign(n, -1);
  host_pos_.assign(n, -1);
  incid_.assign(n, {});
  piece_off_.assign(segments.size(), 0);
  piece_seg_.clear();
  for (int s = 0; s < num_segments(); ++s) {
    const auto& sv = segments[s];
    piece_off_[s] = static_cast<int>(piece_seg_.size());
    for (size_t k = 0; k + 1 < sv.size(); ++k) piece_seg_.push_back(s);
    for (size_t k = 0; k < sv.size(); ++k) {
      incid_[sv[k]].emplace_back(s, static_cast<int>(k));
      if (k > 0 && k + 1 < sv.size() && host_[sv[k]] < 0) {
        host_[sv[k]] = s;
        host_pos_[sv[k]] = static_cast<int>(k);
      }
    }
  }
  if (static_cast<int>(piece_short.size()) != num_pieces()) piece_short.clear();
  if (segment_label.size() != segments.size()) segment_label.resize(segments.size());
  if (static_cast<int>(vertex_label.size()) != n) vertex_label.resize(n);
}

std::pair<int, int> TGraph::piece_ends(int p) const {
  const int s = piece_seg_[p];
  const int k = p - piece_off_[s];
  return {segments[s][k], segments[s][k + 1]};
}

double TGraph::piece_length(int p) const {
  auto [u, v] = piece_ends(p);
  return std::abs(points[u] - points[v]);
}

double TGraph::segment_length(int s) const {
  return std::abs(points[segments[s].front()] - points[segments[s].back()]);
}

int TGraph::piece_between(int u, int v) const {
  for (auto [s, k] : incid_[u]) {
    const auto& sv = segments[s];
    if (k + 1 < static_cast<int>(sv.size()) && sv[k + 1] == v) return piece_off_[s] + k;
    if (k > 0 && sv[k - 1] == v) return piece_off_[s] + k - 1;
  }
  return -1;
}

std::vector<cplx> Face::polygon(const TGraph& g) const {
  std::vector<cplx> out;
  for (int v : cycle) out.push_back(g.points[v]);
  return out;
}

Arrangement build_faces(const TGraph& g) {
  Arrangement arr;
  const int P = g.num_pieces();
  const int H = 2 * P;
  std::vector<int> origin(H), dest(H);
  for (int p = 0; p < P; ++p) {
    auto [u, v] = g.piece_ends(p);
    origin[2 * p] = u;
    dest[2 * p] = v;
    origin[2 * p + 1] = v;
    dest[2 * p + 1] = u;
  }
  std::vector<std::vector<std::pair<double, int>>> out(g.num_vertices());
  for (int h = 0; h < H; ++h) {
    cplx d = g.points[dest[h]] - g.points[origin[h]];
    out[origin[h]].emplace_back(std::atan2(d.imag(), d.real()), h);
  }
  std::vector<int> pos(H);
  for (int v = 0; v < g.num_vertices(); ++v) {
    auto& o = out[v];
    std::sort(o.begin(), o.end());
    for (size_t i = 0; i < o.size(); ++i) {
      pos[o[i].second] = static_cast<int>(i);
      const size_t j = (i + 1) % o.size();
      if (o.size() > 1) {
        double gap = o[j].first - o[i].first;
        if (j == 0) gap += 2 * kPi;
        if (gap < 1e-12) throw Error("DegenerateGeometry", "collinear overlapping pieces at vertex " + std::to_string(v));
      }
    }
  }
  auto next = [&](int h) {
    const int tw = h ^ 1;
    const int v = dest[h];
    const auto& o = out[v];
    const int i = pos[tw];
    return o[(i - 1 + static_cast<int>(o.size())) % o.size()].second;
  };
  std::vector<int> face_id(H, -2);
  std::vector<Face> all;
  for (int h0 = 0; h0 < H; ++h0) {
    if (face_id[h0] != -2) continue;
    Face f;
    int h = h0;
    const int id = static_cast<int>(all.size());
    do {
      face_id[h] = id;
      f.half_edges.push_back(h);
      f.cycle.push_back(origin[h]);
      h = next(h);
    } while (h != h0 && f.half_edges.size() <= static_cast<size_t>(H));
    double a = 0;
    for (size_t i = 0; i < f.cycle.size(); ++i) {
      cplx p = g.points[f.cycle[i]], q = g.points[f.cycle[(i + 1) % f.cycle.size()]];
      a += cross(p, q);
    }
    f.area = a / 2;
    all.push_back(std::move(f));
  }
  int outer = -1;
  for (size_t i = 0; i < all.size(); ++i)
    if (outer < 0 || all[i].area < all[outer].area) outer = static_cast<int>(i);
  std::vector<int> remap(all.size(), -1);
  for (size_t i = 0; i < all.size(); ++i) {
    if (static_cast<int>(i) == outer) continue;
    remap[i] = static_cast<int>(arr.faces.size());
    all[i].id = remap[i];
    arr.faces.push_back(all[i]);
  }
  if (outer >= 0) arr.outer = all[outer];
  arr.face_of_half_edge.assign(H, -1);
  for (int h = 0; h < H; ++h) arr.face_of_half_edge[h] = remap[face_id[h]];
  int V = 0;
  for (int v = 0; v < g.num_vertices(); ++v)
    if (!out[v].empty()) ++V;
  arr.euler_V = V;
  arr.euler_E = P;
  arr.euler_F = static_cast<int>(all.size());
  return arr;
}

bool point_in_polygon(const std::vector<cplx>& poly, cplx z) {
  bool in = false;
  const size_t n = poly.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const cplx a = poly[i], b = poly[j];
    if ((a.imag() > z.imag()) != (b.imag() > z.imag())) {
      const double x = (b.real() - a.real()) * (z.imag() - a.imag()) / (b.imag() - a.imag()) + a.real();
      if (z.real() < x) in = !in;
    }
  }
  return in;
}

int locate_face(const TGraph& g, const Arrangement& arr, cplx z) {
  int best = -1;
  double best_area = 1e300;
  for (const auto& f : arr.faces) {
    auto poly = f.polygon(g);
    if (point_in_polygon(poly, z) && f.area < best_area) {
      best = f.id;
      best_area = f.area;
    }
  }
  return best;
}

ValidationReport validate_tgraph(const TGraph& g, double tol) {
  ValidationReport rep;
  if (tol < 0) tol = g.eps_geom;
  const int S = g.num_segments();
  // Disjointness of open segments.
  double xmin = 1e300, ymin = 1e300, xmax = -1e300, ymax = -1e300, total = 0;
  for (auto p : g.points) {
    xmin = std::min(xmin, p.real());
    ymin = std::min(ymin, p.imag());
    xmax = std::max(xmax, p.real());
    ymax = std::max(ymax, p.imag());
  }
  for (int s = 0; s < S; ++s) total += g.segment_length(s);
  BoxGrid grid(xmin, ymin, xmax, ymax, S ? total / S : 1.0);
  for (int s = 0; s < S; ++s) {
    cplx a = g.points[g.segments[s].front()], b = g.points[g.segments[s].back()];
    grid.insert(s, std::min(a.real(), b.real()) - tol, std::min(a.imag(), b.imag()) - tol,
                std::max(a.real(), b.real()) + tol, std::max(a.imag(), b.imag()) + tol);
  }
  for (int s = 0; s < S; ++s) {
    cplx a = g.points[g.segments[s].front()], b = g.points[g.segments[s].back()];
    const double la = std::abs(b - a);
    if (la <= tol) {
      rep.violations.push_back({"zero-length segment", "segment " + std::to_string(s)});
      continue;
    }
    std::vector<int> seen;
    grid.query(std::min(a.real(), b.real()) - tol, std::min(a.imag(), b.imag()) - tol,
               std::max(a.real(), b.real()) + tol, std::max(a.imag(), b.imag()) + tol, [&](int t) {
                 if (t <= s) return;
                 if (std::find(seen.begin(), seen.end(), t) != seen.end()) return;
                 seen.push_back(t);
                 cplx c = g.points[g.segments[t].front()], d = g.points[g.segments[t].back()];
                 const double lc = std::abs(d - c);
                 if (lc <= tol) return;
                 const double den = cross(b - a, d - c);
                 if (std::abs(den) <= 1e-12 * la * lc) {
                   if (dist_to_line(a, b, c) > tol) return;
                   const double t0 = seg_param(a, b, c), t1 = seg_param(a, b, d);
                   const double lo = std::max(0.0, std::min(t0, t1)), hi = std::min(1.0, std::max(t0, t1));
                   if ((hi - lo) * la > tol)
                     rep.violations.push_back({"not disjoint", "collinear overlap of segments " + std::to_string(s) +
                                                                   " and " + std::to_string(t)});
                   return;
                 }
                 const double u = cross(c - a, d - c) / den, w = cross(c - a, b - a) / den;
                 if (u * la > tol && (1 - u) * la > tol && w * lc > tol && (1 - w) * lc > tol)
                   rep.violations.push_back(
                       {"not disjoint", "segments " + std::to_string(s) + " and " + std::to_string(t) + " cross"});
               });
  }
  // Vertices must be hosted by at most one open segment; stored interior
  // vertices must actually lie on their segment.
  for (int v = 0; v < g.num_vertices(); ++v) {
    int interior = 0, endpoints = 0;
    for (auto [s, k] : g.incidences(v)) {
      const int len = static_cast<int>(g.segments[s].size());
      if (k == 0 || k == len - 1) {
        ++endpoints;
      } else {
        ++interior;
        cplx a = g.points[g.segments[s].front()], b = g.points[g.segments[s].back()];
        if (dist_to_line(a, b, g.points[v]) > tol)
          rep.violations.push_back({"off-segment vertex", "vertex " + std::to_string(v)});
      }
    }
    if (interior > 1) rep.violations.push_back({"not disjoint", "vertex " + std::to_string(v) + " inside two segments"});
    if (g.boundary[v] && interior > 0)
      rep.violations.push_back({"not disjoint", "boundary point " + std::to_string(v) + " inside a segment"});
    if (!g.boundary[v] && interior == 0 && endpoints > 0) {
      if (endpoints >= 3)
        rep.degenerate_vertices.push_back(v);
      else
        rep.violations.push_back({"dangling endpoint", "vertex " + std::to_string(v)});
    }
  }
  // Connectivity of the closed union.
  {
    std::vector<int> parent(g.num_vertices());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (int p = 0; p < g.num_pieces(); ++p) {
      auto [u, v] = g.piece_ends(p);
      parent[find(u)] = find(v);
    }
    std::vector<char> used(g.num_vertices(), 0);
    for (int v = 0; v < g.num_vertices(); ++v)
      if (!g.incidences(v).empty() || g.boundary[v]) used[v] = 1;
    int root = -1, comps = 0;
    for (int v = 0; v < g.num_vertices(); ++v) {
      if (!used[v]) continue;
      if (root < 0) {
        root = find(v);
        comps = 1;
      } else if (find(v) != root) {
        comps = 2;
        break;
      }
    }
    if (comps > 1) rep.violations.push_back({"not connected", "closure of the union is disconnected"});
  }
  // Boundary points on the outer face.
  try {
    Arrangement arr = build_faces(g);
    std::vector<char> on_outer(g.num_vertices(), 0);
    for (int v : arr.outer.cycle) on_outer[v] = 1;
    for (int v = 0; v < g.num_vertices(); ++v)
      if (g.boundary[v] && !on_outer[v] && !(g.incidences(v).empty() && g.num_pieces() == 0))
        rep.violations.push_back({"boundary not on outer face", "vertex " + std::to_string(v)});
  } catch (const Error& e) {
    rep.violations.push_back({"not disjoint", e.what()});
  }
  return rep;
}

double DimerGraph::weight(int b, int w) const {
  double s = 0;
  for (const auto& e : entries)
    if (e.black == b && e.white == w) s += e.weight;
  return s;
}

namespace {
// Boundary occurrences along the outer face walk (face on the left, hence
// clockwise around the graph) together with the interval each outer
// half-edge belongs to, indexed in positive order.
struct OuterIntervals {
  std::vector<int> xs;                      // x_1..x_n in positive order
  std::unordered_map<int, int> interval_of;  // half-edge -> i, meaning (x_{i+1}, x_{i+2}) zero-based
};

OuterIntervals outer_intervals(const TGraph& g, const Arrangement& arr) {
  OuterIntervals oi;
  const auto& he = arr.outer.half_edges;
  const auto& cyc = arr.outer.cycle;
  const int L = static_cast<int>(he.size());
  std::vector<int> occ;  // positions in the walk where a boundary vertex is the origin
  for (int i = 0; i < L; ++i)
    if (g.boundary[cyc[i]]) occ.push_back(i);
  if (occ.empty()) throw Error("NoBoundary", "T-graph has no boundary vertex on its outer face");
  // Start at the occurrence of the smallest boundary vertex id.
  int start = 0;
  for (size_t k = 1; k < occ.size(); ++k)
    if (cyc[occ[k]] < cyc[occ[start]]) start = static_cast<int>(k);
  const int n = static_cast<int>(occ.size());
  // Clockwise occurrence order c_0 = start, c_1, ...; positive order is the
  // reverse: x_1 = c_0, x_2 = c_{n-1}, ..., x_n = c_1.
  std::vector<int> cw(n);
  for (int k = 0; k < n; ++k) cw[k] = occ[(start + k) % n];
  oi.xs.push_back(cyc[cw[0]]);
  for (int k = n - 1; k >= 1; --k) oi.xs.push_back(cyc[cw[k]]);
  // The clockwise stretch c_k -> c_{k+1} is the positive-order pair (c_{k+1}, c_k).
  for (int k = 0; k < n; ++k) {
    const int from = cw[k], to = cw[(k + 1) % n];
    // position of c_{k+1} in positive order: c_0 -> 0, c_j -> n - j
    const int kk = (k + 1) % n;
    const int i = kk == 0 ? 0 : n - kk;  // index of x_i = c_{k+1}
    for (int j = from; j != to; j = (j + 1) % L) oi.interval_of[he[j]] = i;
    if (n == 1)
      for (int j = 0; j < L; ++j) oi.interval_of[he[j]] = 0;
  }
  return oi;
}
}  // namespace

std::vector<int> boundary_cycle(const TGraph& g, const Arrangement& arr) { return outer_intervals(g, arr).xs; }

DualFrame standalone_frame(const TGraph& g, const Arrangement& arr) {
  DualFrame fr;
  const int F = static_cast<int>(arr.faces.size());
  auto oi = outer_intervals(g, arr);
  const int n = static_cast<int>(oi.xs.size());
  fr.num_nodes = F + n;
  fr.root = F + n - 1;  // the interval (x_n, x_1)
  fr.node_face.assign(fr.num_nodes, -1);
  for (int f = 0; f < F; ++f) fr.node_face[f] = f;
  const int P = g.num_pieces();
  fr.piece_left.assign(P, -1);
  fr.piece_right.assign(P, -1);
  auto node = [&](int h) {
    const int f = arr.face_of_half_edge[h];
    if (f >= 0) return f;
    return F + oi.interval_of.at(h);  // interval i -> node F+i, the last is the root
  };
  for (int p = 0; p < P; ++p) {
    fr.piece_left[p] = node(2 * p);
    fr.piece_right[p] = node(2 * p + 1);
  }
  return fr;
}

DimerGraph to_dimer_graph(const TGraph& g, const Arrangement& arr) {
  DimerGraph dg;
  DualFrame fr = standalone_frame(g, arr);
  const int F = static_cast<int>(arr.faces.size());
  dg.num_blacks = g.num_segments();
  dg.num_face_whites = F;
  dg.num_boundary_whites = fr.num_nodes - F - 1;
  auto xs = boundary_cycle(g, arr);
  for (int i = 0; i + 1 < static_cast<int>(xs.size()); ++i) dg.boundary_pairs.emplace_back(xs[i], xs[i + 1]);
  std::map<std::pair<int, int>, double> acc;
  for (int p = 0; p < g.num_pieces(); ++p) {
    const int s = g.piece_segment(p);
    const double len = g.piece_length(p);
    const int l = fr.piece_left[p], r = fr.piece_right[p];
    if (l != fr.root) acc[{s, l}] += len;
    if (r != fr.root && r != l) acc[{s, r}] += len;
  }
  for (auto& [k, w] : acc) dg.entries.push_back({k.first, k.second, w});
  return dg;
}

}  // namespace tiling

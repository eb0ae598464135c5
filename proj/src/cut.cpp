#include "tiling/cut.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <random>

#include "tiling/walk.hpp"

namespace tiling::cut {
namespace {

double seg_dist(cplx a, cplx b, cplx z) {
  const cplx d = b - a;
  const double n = std::norm(d);
  double t = n > 0 ? dot(z - a, d) / n : 0;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(z - (a + t * d));
}

double wrap_pi(double a) {
  while (a > kPi) a -= 2 * kPi;
  while (a <= -kPi) a += 2 * kPi;
  return a;
}

// Net crossings of the ray from c at angle theta by the step x -> y.
struct Lift {
  cplx c;
  double theta;
  int step(cplx x, cplx y) const {
    double ax = std::arg(x - c) - theta;
    while (ax < 0) ax += 2 * kPi;
    while (ax >= 2 * kPi) ax -= 2 * kPi;
    const double d = wrap_pi(std::arg(y - c) - std::arg(x - c));
    return static_cast<int>(std::floor((ax + d) / (2 * kPi)));
  }
};

// Loop moves: single-piece walk moves between non-boundary corridor vertices.
struct MoveGraph {
  std::vector<std::vector<walk::Rate>> out;
  std::vector<char> in_corridor;
};

MoveGraph move_graph(const TGraph& g, const Corridor& c) {
  MoveGraph mg;
  const int n = g.num_vertices();
  mg.in_corridor.assign(n, 0);
  for (int v = 0; v < n; ++v) mg.in_corridor[v] = !g.boundary[v] && c.contains(g.points[v]);
  mg.out.assign(n, {});
  for (int v = 0; v < n; ++v) {
    if (!mg.in_corridor[v] || g.degenerate(v)) continue;
    for (const auto& r : walk::transition_rates(g, v))
      if (mg.in_corridor[r.target] && !g.degenerate(r.target)) mg.out[v].push_back(r);
  }
  return mg;
}

bool classified(const TGraph& g) { return static_cast<int>(g.piece_short.size()) == g.num_pieces(); }

// Simple sub-cycle with non-zero winding of a closed walk (w.front() == w.back()).
std::vector<int> simple_winding_cycle(const TGraph& g, const Lift& L, std::vector<int> w) {
  for (;;) {
    std::map<int, int> first;
    int i = -1, j = -1;
    for (int k = 0; k + 1 < static_cast<int>(w.size()); ++k) {
      auto it = first.find(w[k]);
      if (it != first.end()) {
        i = it->second;
        j = k;
        break;
      }
      first[w[k]] = k;
    }
    if (i < 0) return std::vector<int>(w.begin(), w.end() - 1);
    std::vector<int> a(w.begin() + i, w.begin() + j + 1);
    std::vector<int> b(w.begin(), w.begin() + i + 1);
    b.insert(b.end(), w.begin() + j + 1, w.end());
    auto wind = [&](const std::vector<int>& c) {
      int s = 0;
      for (size_t k = 0; k + 1 < c.size(); ++k) s += L.step(g.points[c[k]], g.points[c[k + 1]]);
      return s;
    };
    w = wind(a) != 0 ? a : b;
  }
}

}  // namespace

double Corridor::distance(cplx z) const {
  double best = 1e300;
  const size_t n = curve.size();
  for (size_t i = 0; i < n; ++i) best = std::min(best, seg_dist(curve[i], curve[(i + 1) % n], z));
  return best;
}

hex::HexCoord nearest_dual(cplx z, double mesh) {
  const cplx u = z / mesh - hex::kDual0;
  const double m = u.real() / (kSqrt3 / 2);
  const double n = u.imag() + m / 2;
  const int64_t m0 = static_cast<int64_t>(std::llround(m)), n0 = static_cast<int64_t>(std::llround(n));
  hex::HexCoord best = hex::dual(m0, n0);
  double bd = 1e300;
  for (int64_t dm = -1; dm <= 1; ++dm)
    for (int64_t dn = -1; dn <= 1; ++dn) {
      auto c = hex::dual(m0 + dm, n0 + dn);
      const double d = std::abs(hex::plane_position(c, mesh) - z);
      if (d < bd) {
        bd = d;
        best = c;
      }
    }
  return best;
}

Corridor corridor_from_lattice_curve(const DualMap& image, double mesh, const std::vector<cplx>& curve, double width,
                                     cplx lattice_center) {
  auto img = [&](cplx z) {
    auto it = image.find(hex_key(nearest_dual(z, mesh)));
    if (it == image.end()) throw Error("OutOfRange", "lattice curve leaves the image map");
    return it->second;
  };
  Corridor c;
  c.width = width;
  for (auto z : curve) {
    const cplx p = img(z);
    if (c.curve.empty() || p != c.curve.back()) c.curve.push_back(p);
  }
  if (c.curve.size() > 1 && c.curve.front() == c.curve.back()) c.curve.pop_back();
  c.center = img(lattice_center);
  return c;
}

std::vector<cplx> circle(cplx c, double r, int n) {
  std::vector<cplx> out;
  for (int k = 0; k < n; ++k) out.push_back(c + std::polar(r, 2 * kPi * k / n));
  return out;
}

bool loop_is_standard(const TGraph& g, const std::vector<int>& loop) {
  if (!classified(g)) throw Error("MissingLabels", "graph has no long/short piece classification");
  std::vector<int> p = loop;
  p.push_back(loop[0]);
  p.push_back(loop[1 % loop.size()]);
  return ust::is_standard(g, p);
}

std::vector<int> fallback_loop(const TGraph& g, const Corridor& c) {
  const MoveGraph mg = move_graph(g, c);
  const int n = g.num_vertices();
  const Lift L{c.center, 0.123456789};
  const bool cls = classified(g);
  auto enc = [](int v, int forced, int sheet) { return (v * 2 + forced) * 3 + sheet + 1; };

  // Starts ordered by distance to the ray, nearest first.
  std::vector<int> starts;
  for (int v = 0; v < n; ++v)
    if (!mg.out[v].empty()) starts.push_back(v);
  auto ray_dist = [&](int v) { return std::abs(wrap_pi(std::arg(g.points[v] - c.center) - L.theta)); };
  std::sort(starts.begin(), starts.end(), [&](int a, int b) { return ray_dist(a) < ray_dist(b); });
  if (starts.size() > 64) starts.resize(64);

  std::vector<int> parent(static_cast<size_t>(n) * 6);
  for (int s : starts) {
    std::fill(parent.begin(), parent.end(), -2);
    std::queue<int> q;
    const int s0 = enc(s, 1, 0);
    parent[s0] = -1;
    q.push(s0);
    int goal = -1;
    while (!q.empty() && goal < 0) {
      const int st = q.front();
      q.pop();
      const int v = st / 6, forced = (st / 3) % 2, sheet = st % 3 - 1;
      const bool must_short = cls && forced && ust::short_available(g, v);
      for (const auto& r : mg.out[v]) {
        const int y = r.target;
        const auto [seg, piece] = ust::move_of(g, v, y);
        const bool sh = cls && piece >= 0 && g.piece_short[piece];
        if (must_short && !sh) continue;
        const int ns = sheet + L.step(g.points[v], g.points[y]);
        if (ns < -1 || ns > 1) continue;
        const int nf = (!sh || seg != g.host(y)) ? 1 : 0;
        const int code = enc(y, nf, ns);
        if (parent[code] != -2) continue;
        parent[code] = st;
        if (y == s && ns != 0) {
          goal = code;
          break;
        }
        q.push(code);
      }
    }
    if (goal < 0) continue;
    std::vector<int> walk_back;
    for (int st = goal; st >= 0; st = parent[st]) walk_back.push_back(st / 6);
    std::reverse(walk_back.begin(), walk_back.end());
    auto loop = simple_winding_cycle(g, L, walk_back);
    if (loop.size() >= 3 && (!cls || loop_is_standard(g, loop))) return loop;
  }
  throw Error("CorridorFailure", "no standard cycle around the center inside the corridor");
}

LoopSearch find_standard_loop(const TGraph& g, const Corridor& c, uint64_t seed, int max_attempts, long max_steps) {
  const MoveGraph mg = move_graph(g, c);
  const int n = g.num_vertices();
  const Lift L{c.center, 0.123456789};
  const bool cls = classified(g);
  std::vector<int> starts;
  for (int v = 0; v < n; ++v)
    if (!mg.out[v].empty()) starts.push_back(v);
  if (starts.empty()) throw Error("CorridorFailure", "corridor contains no movable vertex");

  LoopSearch res;
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<int> idx(n, -1);
  for (int a = 0; a < max_attempts; ++a) {
    ++res.attempts;
    auto rng = walk::make_rng(seed, static_cast<uint64_t>(a));
    std::vector<int> path, lift;
    int x = starts[static_cast<size_t>(U(rng) * starts.size()) % starts.size()];
    int cur = 0;
    path.push_back(x);
    lift.push_back(0);
    idx[x] = 0;
    std::vector<int> loop;
    for (long k = 0; k < max_steps && loop.empty(); ++k) {
      const auto& out = mg.out[x];
      if (out.empty()) break;
      double tot = 0;
      for (const auto& r : out) tot += r.rate;
      double u = U(rng) * tot;
      int y = out.back().target;
      for (const auto& r : out) {
        u -= r.rate;
        if (u < 0) {
          y = r.target;
          break;
        }
      }
      cur += L.step(g.points[x], g.points[y]);
      const int j = idx[y];
      if (j >= 0) {
        if (cur == lift[j]) {
          for (size_t t = j + 1; t < path.size(); ++t) idx[path[t]] = -1;
          path.resize(j + 1);
          lift.resize(j + 1);
        } else {
          loop.assign(path.begin() + j, path.end());
        }
      } else {
        idx[y] = static_cast<int>(path.size());
        path.push_back(y);
        lift.push_back(cur);
      }
      x = y;
    }
    for (int v : path) idx[v] = -1;
    if (loop.size() >= 3 && (!cls || loop_is_standard(g, loop))) {
      res.loop = loop;
      return res;
    }
  }
  res.loop = fallback_loop(g, c);
  res.used_fallback = true;
  return res;
}

std::vector<std::optional<hex::HexCoord>> label_faces_by_corners(const TGraph& g, const Arrangement& arr) {
  std::vector<std::optional<hex::HexCoord>> out(arr.faces.size());
  for (const auto& f : arr.faces) {
    std::vector<uint64_t> keys;
    for (int v : f.cycle)
      if (g.vertex_label[v]) keys.push_back(hex_key(*g.vertex_label[v]));
    std::sort(keys.begin(), keys.end());
    auto has = [&](const hex::HexCoord& c) { return std::binary_search(keys.begin(), keys.end(), hex_key(c)); };
    std::vector<hex::HexCoord> found;
    for (int v : f.cycle) {
      if (!g.vertex_label[v]) continue;
      const auto d = *g.vertex_label[v];
      for (auto w : {hex::white(d.m, d.n), hex::white(d.m, d.n - 1), hex::white(d.m + 1, d.n)}) {
        auto corners = hex::white_face(w);
        if (has(corners[0]) && has(corners[1]) && has(corners[2]) &&
            std::find(found.begin(), found.end(), w) == found.end())
          found.push_back(w);
      }
    }
    if (found.size() > 1) throw Error("LabelConflict", "face " + std::to_string(f.id) + " fits two whites");
    if (found.size() == 1) out[f.id] = found[0];
  }
  return out;
}

CutDomain cut_from_loop(const TGraph& g, const std::vector<int>& loop_in) {
  const int n = g.num_vertices();
  const int k = static_cast<int>(loop_in.size());
  if (k < 3) throw Error("CorridorFailure", "loop too short");
  std::vector<int> on_loop(n, -1);
  for (int i = 0; i < k; ++i) {
    if (on_loop[loop_in[i]] >= 0) throw Error("CorridorFailure", "loop is not simple");
    on_loop[loop_in[i]] = i;
  }
  std::vector<cplx> poly;
  for (int v : loop_in) poly.push_back(g.points[v]);

  // loop pieces and inside pieces
  const int P = g.num_pieces();
  std::vector<char> loop_piece(P, 0), inside(P, 0);
  for (int i = 0; i < k; ++i) {
    const int p = g.piece_between(loop_in[i], loop_in[(i + 1) % k]);
    if (p < 0) throw Error("CorridorFailure", "loop step is not a single piece");
    loop_piece[p] = 1;
  }
  for (int p = 0; p < P; ++p) {
    if (loop_piece[p]) continue;
    auto [a, b] = g.piece_ends(p);
    inside[p] = point_in_polygon(poly, 0.5 * (g.points[a] + g.points[b]));
  }
  std::vector<int> run_lo(g.num_segments(), -1), run_hi(g.num_segments(), -1);
  for (int s = 0; s < g.num_segments(); ++s) {
    const int np = static_cast<int>(g.segments[s].size()) - 1;
    for (int q = 0; q < np; ++q) {
      if (!inside[g.piece_offset(s) + q]) continue;
      if (run_lo[s] < 0) run_lo[s] = q;
      else if (run_hi[s] != q - 1) throw Error("StructuralError", "segment re-enters the loop");
      run_hi[s] = q;
    }
  }

  // closing move: first rotation whose segment has no inside part
  int rot = -1;
  for (int i = 0; i < k && rot < 0; ++i) {
    const int p = g.piece_between(loop_in[i], loop_in[(i + 1) % k]);
    if (run_lo[g.piece_segment(p)] < 0) rot = i;
  }
  if (rot < 0) throw Error("CorridorFailure", "no admissible closing edge on the loop");
  std::vector<int> loop(loop_in.begin() + rot, loop_in.end());
  loop.insert(loop.end(), loop_in.begin(), loop_in.begin() + rot);

  CutDomain cd;
  TGraph& h = cd.gamma;
  std::vector<int> nid(n, -1);
  auto add_vertex = [&](int v) {
    if (nid[v] < 0) {
      nid[v] = static_cast<int>(h.points.size());
      h.points.push_back(g.points[v]);
      h.boundary.push_back(on_loop[v] >= 0);
      h.vertex_label.push_back(v < static_cast<int>(g.vertex_label.size()) ? g.vertex_label[v] : std::nullopt);
      cd.source_vertex.push_back(v);
    }
    return nid[v];
  };
  for (int v : loop) add_vertex(v);
  const bool cls = classified(g);
  std::vector<char> shorts;
  auto label_of = [&](int s) {
    return s < static_cast<int>(g.segment_label.size()) ? g.segment_label[s] : std::nullopt;
  };
  // closing piece first, so b0 = 0
  {
    const int p = g.piece_between(loop[0], loop[1]);
    auto [a, b] = g.piece_ends(p);
    h.segments.push_back({add_vertex(a), add_vertex(b)});
    h.segment_label.push_back(label_of(g.piece_segment(p)));
    cd.source_segment.push_back(g.piece_segment(p));
    cd.inside_segment.push_back(0);
    shorts.push_back(cls ? g.piece_short[p] : 0);
  }
  cd.b0 = 0;
  for (int i = 1; i < k; ++i) {
    const int p = g.piece_between(loop[i], loop[(i + 1) % k]);
    auto [a, b] = g.piece_ends(p);
    h.segments.push_back({add_vertex(a), add_vertex(b)});
    h.segment_label.push_back(label_of(g.piece_segment(p)));
    cd.source_segment.push_back(g.piece_segment(p));
    cd.inside_segment.push_back(0);
    shorts.push_back(cls ? g.piece_short[p] : 0);
  }
  std::vector<int> run_segment(g.num_segments(), -1);
  for (int s = 0; s < g.num_segments(); ++s) {
    if (run_lo[s] < 0) continue;
    std::vector<int> sv;
    for (int q = run_lo[s]; q <= run_hi[s] + 1; ++q) sv.push_back(add_vertex(g.segments[s][q]));
    run_segment[s] = static_cast<int>(h.segments.size());
    h.segments.push_back(sv);
    h.segment_label.push_back(label_of(s));
    cd.source_segment.push_back(s);
    cd.inside_segment.push_back(1);
    for (int q = run_lo[s]; q <= run_hi[s]; ++q) shorts.push_back(cls ? g.piece_short[g.piece_offset(s) + q] : 0);
  }
  for (const auto& dg : g.degenerate_geometry) {
    if (nid[dg.vertex] < 0 || h.boundary[nid[dg.vertex]]) continue;
    DegenerateGeometry d = dg;
    d.vertex = nid[dg.vertex];
    for (auto& s : d.seg) s = s >= 0 ? run_segment[s] : -1;
    h.degenerate_geometry.push_back(d);
  }
  h.eps_geom = g.eps_geom;
  h.finalize();
  if (cls) h.piece_short = shorts;  // pieces are numbered segment by segment in insertion order

  for (int v : loop) cd.loop.push_back(nid[v]);
  cd.arr = build_faces(h);
  const int F = static_cast<int>(cd.arr.faces.size());
  DualFrame& fr = cd.frame;
  fr.num_nodes = F + 1;
  fr.root = F;
  fr.node_face.assign(F + 1, -1);
  for (int f = 0; f < F; ++f) fr.node_face[f] = f;
  fr.piece_left.assign(h.num_pieces(), -1);
  fr.piece_right.assign(h.num_pieces(), -1);
  auto node = [&](int f) { return f >= 0 ? f : F; };
  for (int p = 0; p < h.num_pieces(); ++p) {
    const int s = h.piece_segment(p);
    if (!cd.inside_segment[s] && s != cd.b0) continue;
    fr.piece_left[p] = node(cd.arr.left_face(p));
    fr.piece_right[p] = node(cd.arr.right_face(p));
  }
  {
    const int p = h.piece_offset(cd.b0);
    cd.w0 = cd.arr.left_face(p) >= 0 ? cd.arr.left_face(p) : cd.arr.right_face(p);
    if (cd.w0 < 0) throw Error("StructuralError", "closing piece bounds no inside face");
  }

  std::map<std::pair<int, int>, double> acc;
  for (int p = 0; p < h.num_pieces(); ++p) {
    const int s = h.piece_segment(p);
    if (!cd.inside_segment[s]) continue;
    const int l = cd.arr.left_face(p), r = cd.arr.right_face(p);
    for (int f : {l, r})
      if (f >= 0 && f != cd.w0 && !(f == r && r == l)) acc[{s, f}] += h.piece_length(p);
  }
  for (auto& [key, w] : acc) cd.u_tilde.push_back({key.first, key.second, w});
  cd.num_tilde_whites = F - 1;
  cd.num_tilde_blacks = 0;
  for (char c : cd.inside_segment) cd.num_tilde_blacks += c;

  // lattice side
  bool have_labels = true;
  for (int s = 0; s < h.num_segments(); ++s) have_labels &= h.segment_label[s].has_value();
  for (int v = 0; v < h.num_vertices(); ++v) have_labels &= h.vertex_label[v].has_value();
  if (have_labels) {
    auto fl = label_faces_by_corners(h, cd.arr);
    bool all = true;
    for (auto& o : fl) all &= o.has_value();
    if (all) {
      std::vector<hex::HexCoord> whites, blacks;
      for (int f = 0; f < F; ++f)
        if (f != cd.w0) whites.push_back(*fl[f]);
      for (int s = 0; s < h.num_segments(); ++s)
        if (cd.inside_segment[s]) blacks.push_back(*h.segment_label[s]);
      cd.u_hex = HexSubgraph::from_coords(whites, blacks);
      cd.face_white.assign(F, -1);
      cd.segment_black.assign(h.num_segments(), -1);
      for (int f = 0; f < F; ++f)
        if (f != cd.w0) cd.face_white[f] = cd.u_hex.white_index(*fl[f]);
      for (int s = 0; s < h.num_segments(); ++s)
        if (cd.inside_segment[s]) cd.segment_black[s] = cd.u_hex.black_index(*h.segment_label[s]);
      cd.w0_label = *fl[cd.w0];
      cd.b0_label = *h.segment_label[cd.b0];
      cd.labeled = true;
    }
  }
  return cd;
}

CutDomain cut_domain(const TGraph& g, const Corridor& c, uint64_t seed, int max_attempts) {
  auto ls = find_standard_loop(g, c, seed, max_attempts);
  CutDomain cd = cut_from_loop(g, ls.loop);
  cd.used_fallback = ls.used_fallback;
  cd.attempts = ls.attempts;
  return cd;
}

HexSubgraph weighted_u_hex(const CutDomain& cd, bool drop_extra) {
  if (!cd.labeled) throw Error("MissingLabels", "cut domain has no lattice labels");
  HexSubgraph u = cd.u_hex;
  for (auto& w : u.weight) w = {0, 0, 0};
  for (const auto& e : cd.u_tilde) {
    const int wi = cd.face_white[e.white], bi = cd.segment_black[e.black];
    int slot = -1;
    for (int t = 0; t < 3; ++t)
      if (u.white_nb[wi][t] == bi) slot = t;
    if (slot < 0 && drop_extra) continue;
    if (slot < 0) throw Error("LabelMismatch", "U-tilde edge is not a honeycomb edge");
    u.weight[wi][slot] = e.weight;
  }
  return u;
}

HexMatching hex_matching(const CutDomain& cd, const ust::SpanningTree& t) {
  if (!cd.labeled) throw Error("MissingLabels", "cut domain has no lattice labels");
  auto tm = ust::tree_to_matching(cd.gamma, t, cd.frame);
  if (tm.node_black[cd.w0] != cd.b0) throw Error("StructuralError", "w0 is not matched through the closing piece");
  HexMatching m(cd.u_hex.whites.size(), -1);
  for (int f = 0; f < static_cast<int>(cd.arr.faces.size()); ++f) {
    if (f == cd.w0) continue;
    const int s = tm.node_black[f];
    if (s < 0 || cd.segment_black[s] < 0) throw Error("StructuralError", "face matched outside U-tilde");
    m[cd.face_white[f]] = cd.segment_black[s];
  }
  return m;
}

FlatCut make_flat_cut(const planar::PlanarParams& p, double lattice_radius, uint64_t seed, double width_factor) {
  p.check();
  // (m, n) of a lattice point z = m e1 + n e2, then its drift image
  auto drift = [&](cplx z) {
    const double m = z.real() / (kSqrt3 / 2), n = z.imag() + m / 2;
    return m * (p.B - p.A) + n * (p.C - p.B);
  };
  double reach = 0;
  for (auto z : circle(0, lattice_radius + 3, 64)) reach = std::max(reach, std::abs(drift(z)));
  FlatCut fc;
  planar::PatchOptions opt;
  opt.perturb_lambda = true;
  fc.patch = planar::build_whole_plane_patch(p, planar::Window::disk(0, reach + 3 * p.max_side()), 1.0, opt);
  DualMap img;
  for (auto& [mn, z] : fc.patch.T) img[hex_key(mn.first, mn.second)] = z;
  fc.corridor = corridor_from_lattice_curve(img, 1.0, circle(0, lattice_radius, 256), width_factor * p.max_side(), 0);
  fc.cut = cut_domain(fc.patch.graph, fc.corridor, seed);
  return fc;
}

}  // namespace tiling::cut

#include "tiling/hexgraph.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <unordered_set>

namespace tiling {

using hex::HexCoord;

HexSubgraph HexSubgraph::from_coords(const std::vector<HexCoord>& whites, const std::vector<HexCoord>& blacks) {
  HexSubgraph g;
  g.whites = whites;
  g.blacks = blacks;
  for (size_t i = 0; i < whites.size(); ++i)
    if (!g.wi_.emplace(hex_key(whites[i]), static_cast<int>(i)).second) throw Error("Duplicate", "repeated white");
  for (size_t i = 0; i < blacks.size(); ++i)
    if (!g.bi_.emplace(hex_key(blacks[i]), static_cast<int>(i)).second) throw Error("Duplicate", "repeated black");
  g.white_nb.assign(whites.size(), {-1, -1, -1});
  g.black_nb.assign(blacks.size(), {-1, -1, -1});
  g.weight.assign(whites.size(), {1.0, 1.0, 1.0});
  for (size_t i = 0; i < whites.size(); ++i) {
    auto nb = hex::black_neighbors(whites[i]);
    for (int t = 0; t < 3; ++t) {
      const int j = g.black_index(nb[t]);
      g.white_nb[i][t] = j;
      if (j >= 0) g.black_nb[j][t] = static_cast<int>(i);
    }
  }
  return g;
}

int HexSubgraph::white_index(const HexCoord& w) const {
  auto it = wi_.find(hex_key(w));
  return it == wi_.end() ? -1 : it->second;
}

int HexSubgraph::black_index(const HexCoord& b) const {
  auto it = bi_.find(hex_key(b));
  return it == bi_.end() ? -1 : it->second;
}

int HexSubgraph::num_edges() const {
  int e = 0;
  for (const auto& nb : white_nb)
    for (int j : nb) e += j >= 0;
  return e;
}

std::vector<HexCoord> HexSubgraph::faces() const {
  std::unordered_set<uint64_t> seen;
  std::vector<HexCoord> out;
  auto add = [&](const HexCoord& v) {
    if (seen.insert(hex_key(v)).second) out.push_back(v);
  };
  for (const auto& w : whites)
    for (const auto& v : hex::white_face(w)) add(v);
  for (const auto& b : blacks)
    for (const auto& v : hex::black_face(b)) add(v);
  std::sort(out.begin(), out.end(), [](const HexCoord& a, const HexCoord& b) { return std::pair(a.m, a.n) < std::pair(b.m, b.n); });
  return out;
}

std::vector<HexCoord> HexSubgraph::interior_faces() const {
  std::vector<HexCoord> out;
  for (const auto& v : faces()) {
    auto r = hex::face_ring(v);
    bool all = true;
    for (int i = 0; i < 3; ++i) all &= white_index(r.whites[i]) >= 0 && black_index(r.blacks[i]) >= 0;
    if (all) out.push_back(v);
  }
  return out;
}

namespace {
bool inside(const std::vector<cplx>& poly, cplx z) {
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
}  // namespace

HexSubgraph polygon_region(const std::vector<cplx>& poly) {
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (auto p : poly) {
    xmin = std::min(xmin, p.real());
    xmax = std::max(xmax, p.real());
    ymin = std::min(ymin, p.imag());
    ymax = std::max(ymax, p.imag());
  }
  // position = base + m e1 + n e2 with e1 = (sqrt3/2, -1/2): m = 2x/sqrt3, n = y + m/2
  const int64_t m0 = static_cast<int64_t>(std::floor(2 * xmin / kSqrt3)) - 2;
  const int64_t m1 = static_cast<int64_t>(std::ceil(2 * xmax / kSqrt3)) + 2;
  std::vector<HexCoord> W, B;
  for (int64_t m = m0; m <= m1; ++m) {
    const int64_t n0 = static_cast<int64_t>(std::floor(ymin + m / 2.0)) - 2;
    const int64_t n1 = static_cast<int64_t>(std::ceil(ymax + m / 2.0)) + 2;
    for (int64_t n = n0; n <= n1; ++n) {
      if (inside(poly, hex::plane_position(hex::white(m, n)))) W.push_back(hex::white(m, n));
      if (inside(poly, hex::plane_position(hex::black(m, n)))) B.push_back(hex::black(m, n));
    }
  }
  return HexSubgraph::from_coords(W, B);
}

HexSubgraph hexagon_region(int a, int b, int c) {
  const cplx p0 = hex::kDual0;
  const cplx u1 = hex::e1, u2 = hex::e1 + hex::e2, u3 = hex::e2;
  std::vector<cplx> poly{p0};
  for (auto [len, u] : {std::pair{a, u1}, {b, u2}, {c, u3}, {a, -u1}, {b, -u2}, {c, -u3}})
    poly.push_back(poly.back() + static_cast<double>(len) * u);
  poly.pop_back();
  return polygon_region(poly);
}

bool is_perfect(const HexSubgraph& g, const HexMatching& m) {
  if (m.size() != g.whites.size() || !g.balanced()) return false;
  std::vector<char> used(g.blacks.size(), 0);
  for (size_t i = 0; i < m.size(); ++i) {
    const int b = m[i];
    if (b < 0 || b >= static_cast<int>(g.blacks.size()) || used[b]) return false;
    if (std::find(g.white_nb[i].begin(), g.white_nb[i].end(), b) == g.white_nb[i].end()) return false;
    used[b] = 1;
  }
  return true;
}

HexMatching some_matching(const HexSubgraph& g, std::mt19937_64& rng) {
  if (!g.balanced()) return {};
  const int n = static_cast<int>(g.whites.size());
  HexMatching m(n, -1);
  std::vector<int> bm(g.blacks.size(), -1);
  std::function<bool()> rec = [&]() -> bool {
    int best = -1, best_deg = 4;
    for (int i = 0; i < n; ++i) {
      if (m[i] >= 0) continue;
      int d = 0;
      for (int b : g.white_nb[i]) d += b >= 0 && bm[b] < 0;
      if (d < best_deg) {
        best = i;
        best_deg = d;
      }
    }
    if (best < 0) return true;
    if (best_deg == 0) return false;
    std::array<int, 3> order{0, 1, 2};
    std::shuffle(order.begin(), order.end(), rng);
    for (int t : order) {
      const int b = g.white_nb[best][t];
      if (b < 0 || bm[b] >= 0) continue;
      m[best] = b;
      bm[b] = best;
      if (rec()) return true;
      m[best] = -1;
      bm[b] = -1;
    }
    return false;
  };
  return rec() ? m : HexMatching{};
}

bool simply_connected(const HexSubgraph& g) {
  const size_t nw = g.whites.size(), nb = g.blacks.size();
  if (nw + nb == 0) return false;
  // region connectivity through shared triangle edges
  std::vector<char> seen_w(nw, 0), seen_b(nb, 0);
  std::queue<std::pair<int, int>> q;  // (is_black, index)
  if (nw) {
    q.push({0, 0});
    seen_w[0] = 1;
  } else {
    q.push({1, 0});
    seen_b[0] = 1;
  }
  size_t count = 1;
  while (!q.empty()) {
    auto [isb, i] = q.front();
    q.pop();
    const auto& nbs = isb ? g.black_nb[i] : g.white_nb[i];
    for (int j : nbs) {
      if (j < 0) continue;
      auto& s = isb ? seen_w[j] : seen_b[j];
      if (!s) {
        s = 1;
        ++count;
        q.push({!isb, j});
      }
    }
  }
  if (count != nw + nb) return false;
  // no pinch points: around every dual vertex the region triangles form one run
  for (const auto& v : g.faces()) {
    auto r = hex::face_ring(v);
    std::array<bool, 6> in{};
    for (int i = 0; i < 3; ++i) {
      in[2 * i] = g.black_index(r.blacks[i]) >= 0;
      in[2 * i + 1] = g.white_index(r.whites[i]) >= 0;
    }
    int runs = 0;
    for (int i = 0; i < 6; ++i) runs += in[i] && !in[(i + 5) % 6];
    if (runs > 1) return false;
  }
  // complement connectivity inside a padded box
  int64_t m0 = INT64_MAX, m1 = INT64_MIN, n0 = INT64_MAX, n1 = INT64_MIN;
  for (const auto* vec : {&g.whites, &g.blacks})
    for (const auto& c : *vec) {
      m0 = std::min(m0, c.m);
      m1 = std::max(m1, c.m);
      n0 = std::min(n0, c.n);
      n1 = std::max(n1, c.n);
    }
  m0 -= 2;
  n0 -= 2;
  m1 += 2;
  n1 += 2;
  auto in_box = [&](const HexCoord& c) { return c.m >= m0 && c.m <= m1 && c.n >= n0 && c.n <= n1; };
  auto present = [&](const HexCoord& c) {
    return c.role == hex::Role::White ? g.white_index(c) >= 0 : g.black_index(c) >= 0;
  };
  std::unordered_set<uint64_t> vis_w, vis_b;
  size_t total = 0;
  for (int64_t m = m0; m <= m1; ++m)
    for (int64_t n = n0; n <= n1; ++n) {
      total += g.white_index(hex::white(m, n)) < 0;
      total += g.black_index(hex::black(m, n)) < 0;
    }
  std::queue<HexCoord> qq;
  qq.push(hex::white(m0, n0));
  vis_w.insert(hex_key(m0, n0));
  size_t reached = 1;
  while (!qq.empty()) {
    auto c = qq.front();
    qq.pop();
    auto nbs = c.role == hex::Role::White ? hex::black_neighbors(c) : hex::white_neighbors(c);
    for (const auto& d : nbs) {
      if (!in_box(d) || present(d)) continue;
      auto& vis = d.role == hex::Role::White ? vis_w : vis_b;
      if (vis.insert(hex_key(d)).second) {
        ++reached;
        qq.push(d);
      }
    }
  }
  return reached == total;
}

HexSubgraph random_region(std::mt19937_64& rng, int a, int b, int c, int removals) {
  HexSubgraph g = hexagon_region(a, b, c);
  HexMatching m = some_matching(g, rng);
  std::vector<HexCoord> W = g.whites, B = g.blacks;
  std::vector<std::pair<HexCoord, HexCoord>> pairs;
  for (size_t i = 0; i < m.size(); ++i) pairs.emplace_back(g.whites[i], g.blacks[m[i]]);
  for (int k = 0; k < removals && pairs.size() > 1; ++k) {
    for (int attempt = 0; attempt < 20; ++attempt) {
      std::uniform_int_distribution<size_t> pick(0, pairs.size() - 1);
      const size_t i = pick(rng);
      std::vector<HexCoord> W2, B2;
      for (size_t j = 0; j < pairs.size(); ++j)
        if (j != i) {
          W2.push_back(pairs[j].first);
          B2.push_back(pairs[j].second);
        }
      auto h = HexSubgraph::from_coords(W2, B2);
      if (!simply_connected(h)) continue;
      pairs.erase(pairs.begin() + static_cast<long>(i));
      break;
    }
  }
  W.clear();
  B.clear();
  for (auto& [w, bb] : pairs) {
    W.push_back(w);
    B.push_back(bb);
  }
  return HexSubgraph::from_coords(W, B);
}

}  // namespace tiling

#include "tiling/ust.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

namespace tiling::ust {
std::pair<int, int> move_of(const TGraph& g, int u, int v) {
  const int p = g.piece_between(u, v);
  if (p >= 0) return {g.piece_segment(p), p};
  for (auto [s, k] : g.incidences(u)) {
    const auto& sv = g.segments[s];
    if ((sv.front() == u && sv.back() == v) || (sv.back() == u && sv.front() == v)) return {s, -1};
  }
  return {-1, -1};
}

bool short_available(const TGraph& g, int v) {
  const int s = g.host(v);
  if (s < 0 || g.boundary[v]) return false;
  const int k = g.host_pos(v);
  const int base = g.piece_offset(s);
  return g.piece_short[base + k - 1] || g.piece_short[base + k];
}

namespace {

bool is_short(const TGraph& g, int piece) { return piece >= 0 && g.piece_short[piece]; }

void require_labels(const TGraph& g) {
  if (static_cast<int>(g.piece_short.size()) != g.num_pieces())
    throw Error("MissingLabels", "graph has no long/short piece classification");
}

}  // namespace

SpanningTree wilson_sample(const TGraph& g, const walk::JumpTable& jt, uint64_t seed, uint64_t index,
                           const WilsonOptions& opt) {
  const int n = g.num_vertices();
  if (std::none_of(g.boundary.begin(), g.boundary.end(), [](char b) { return b != 0; })) throw Error("NoBoundary", "wired tree needs at least one boundary vertex");
  if (opt.track_standard) require_labels(g);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const cplx pa = g.points[a], pb = g.points[b];
    if (pa.imag() != pb.imag()) return pa.imag() < pb.imag();
    if (pa.real() != pb.real()) return pa.real() < pb.real();
    return a < b;
  });

  auto rng = walk::make_rng(seed, index);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  SpanningTree t;
  t.next.assign(n, -1);
  std::vector<char> in_tree(n, 0);
  for (int v = 0; v < n; ++v) in_tree[v] = jt.degree(v) == 0;
  std::vector<int> nxt(n, -1);

  for (int start : order) {
    if (in_tree[start]) continue;
    // Random walk until the current tree, remembering the last exit of each
    // vertex; following these exits is the chronological loop erasure.
    int x = start;
    bool forced = true;
    while (!in_tree[x]) {
      if (++t.steps > opt.max_steps)
        throw Error("NonTermination", "Wilson walk exceeded " + std::to_string(opt.max_steps) + " steps from vertex " +
                                          std::to_string(start));
      const int y = jt.pick(x, U(rng));
      if (opt.track_standard) {
        auto [s, p] = move_of(g, x, y);
        if (forced && short_available(g, x) && !is_short(g, p)) t.all_walks_standard = false;
        forced = !is_short(g, p) || s != g.host(y);
      }
      nxt[x] = y;
      x = y;
    }
    for (x = start; !in_tree[x]; x = nxt[x]) {
      t.next[x] = nxt[x];
      in_tree[x] = 1;
    }
  }
  return t;
}

SpanningTree wilson_sample(const TGraph& g, uint64_t seed, uint64_t index) {
  if (std::none_of(g.boundary.begin(), g.boundary.end(), [](char b) { return b != 0; }))
    throw Error("NoBoundary", "wired tree needs at least one boundary vertex");
  walk::JumpTable jt(g);
  return wilson_sample(g, jt, seed, index);
}

bool is_valid_tree(const TGraph& g, const SpanningTree& t, std::string* why) {
  auto fail = [&](const std::string& s) {
    if (why) *why = s;
    return false;
  };
  const int n = g.num_vertices();
  if (static_cast<int>(t.next.size()) != n) return fail("size mismatch");
  for (int v = 0; v < n; ++v) {
    if (g.boundary[v]) {
      if (t.next[v] != -1) return fail("boundary vertex with an outgoing edge");
      continue;
    }
    const int w = t.next[v];
    if (w < 0 || w >= n) return fail("interior vertex " + std::to_string(v) + " without outgoing edge");
    bool ok = false;
    for (const auto& r : walk::rates(g, v)) ok |= (r.target == w);
    if (!ok) return fail("edge " + std::to_string(v) + "->" + std::to_string(w) + " is not a walk move");
  }
  // Acyclic: every vertex reaches the boundary.
  std::vector<char> state(n, 0);  // 0 new, 1 on stack, 2 done
  for (int v = 0; v < n; ++v) {
    std::vector<int> stack;
    int x = v;
    while (x >= 0 && state[x] == 0) {
      state[x] = 1;
      stack.push_back(x);
      x = t.next[x];
    }
    if (x >= 0 && state[x] == 1) return fail("oriented cycle through " + std::to_string(x));
    for (int y : stack) state[y] = 2;
  }
  return true;
}

int tree_piece(const TGraph& g, const SpanningTree& t, int v) {
  if (t.next[v] < 0) return -1;
  return g.piece_between(v, t.next[v]);
}

TreeMatching tree_to_matching(const TGraph& g, const SpanningTree& t, const DualFrame& fr) {
  const int P = g.num_pieces();
  std::vector<char> covered(P, 0);
  for (int v = 0; v < g.num_vertices(); ++v) {
    const int p = tree_piece(g, t, v);
    if (p >= 0) covered[p] = 1;
  }
  // Uncovered in-frame pieces, one per segment.
  std::vector<int> seg_piece(g.num_segments(), -1);
  std::vector<std::vector<std::pair<int, int>>> adj(fr.num_nodes);  // (node, piece)
  for (int s = 0; s < g.num_segments(); ++s) {
    int count = 0, touching = 0;
    const int np = static_cast<int>(g.segments[s].size()) - 1;
    for (int k = 0; k < np; ++k) {
      const int p = g.piece_offset(s) + k;
      if (fr.piece_left[p] < 0 && fr.piece_right[p] < 0) continue;
      ++touching;
      if (covered[p]) continue;
      ++count;
      seg_piece[s] = p;
    }
    if (touching > 0 && count != 1)
      throw Error("StructuralError",
                  "segment " + std::to_string(s) + " has " + std::to_string(count) + " uncovered pieces");
    if (count == 1) {
      const int p = seg_piece[s];
      const int l = fr.piece_left[p], r = fr.piece_right[p];
      if (l < 0 || r < 0 || l == r) throw Error("StructuralError", "uncovered piece without two sides");
      adj[l].push_back({r, p});
      adj[r].push_back({l, p});
    }
  }
  TreeMatching m;
  m.node_black.assign(fr.num_nodes, -1);
  m.black_node.assign(g.num_segments(), -1);
  std::vector<char> seen(fr.num_nodes, 0);
  std::queue<int> q;
  q.push(fr.root);
  seen[fr.root] = 1;
  int reached = 1;
  while (!q.empty()) {
    const int a = q.front();
    q.pop();
    for (auto [b, p] : adj[a]) {
      if (seen[b]) {
        if (m.node_black[a] != g.piece_segment(p))
          throw Error("StructuralError", "uncovered pieces contain a cycle");
        continue;
      }
      seen[b] = 1;
      ++reached;
      const int s = g.piece_segment(p);
      m.node_black[b] = s;
      m.black_node[s] = b;
      q.push(b);
    }
  }
  int matched_segments = 0;
  for (int s = 0; s < g.num_segments(); ++s) matched_segments += seg_piece[s] >= 0;
  if (reached - 1 != matched_segments)
    throw Error("StructuralError", "uncovered pieces do not form a tree on the frame");
  return m;
}

bool is_standard(const TGraph& g, const std::vector<int>& path) {
  require_labels(g);
  bool forced = true;
  for (size_t i = 0; i + 1 < path.size(); ++i) {
    const int x = path[i], y = path[i + 1];
    auto [s, p] = move_of(g, x, y);
    if (s < 0) throw Error("NotAdjacent", "path step is not a walk move");
    if (forced && short_available(g, x) && !is_short(g, p)) return false;
    forced = !is_short(g, p) || s != g.host(y);
  }
  return true;
}

int double_long_occupations(const TGraph& g, const SpanningTree& t) {
  require_labels(g);
  std::vector<int> count(g.num_segments(), 0);
  for (int v = 0; v < g.num_vertices(); ++v) {
    const int p = tree_piece(g, t, v);
    if (p >= 0 && !g.piece_short[p]) ++count[g.piece_segment(p)];
  }
  int k = 0;
  for (int c : count) k += c >= 2;
  return k;
}

}  // namespace tiling::ust

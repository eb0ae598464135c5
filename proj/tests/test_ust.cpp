#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <map>

#include "fixtures.hpp"
#include "tiling/planar.hpp"
#include "tiling/ust.hpp"

using namespace tiling;

namespace {

// All wired spanning trees with weight prod 1/|x - y|.
std::vector<std::pair<std::vector<int>, double>> enumerate_trees(const TGraph& g) {
  std::vector<int> interior;
  for (int v = 0; v < g.num_vertices(); ++v)
    if (!g.boundary[v]) interior.push_back(v);
  std::vector<std::pair<std::vector<int>, double>> out;
  ust::SpanningTree t;
  t.next.assign(g.num_vertices(), -1);
  std::function<void(size_t, double)> rec = [&](size_t i, double w) {
    if (i == interior.size()) {
      if (ust::is_valid_tree(g, t)) out.push_back({t.next, w});
      return;
    }
    const int v = interior[i];
    for (auto& r : walk::transition_rates(g, v)) {
      t.next[v] = r.target;
      rec(i + 1, w / std::abs(g.points[v] - g.points[r.target]));
    }
  };
  rec(0, 1.0);
  return out;
}

// All perfect matchings of the dimer graph (blacks to whites other than the
// root), as black -> white, with product weights.
std::map<std::vector<int>, double> enumerate_dimers(const DimerGraph& d) {
  std::map<std::vector<int>, double> out;
  std::vector<std::vector<std::pair<int, double>>> nb(d.num_blacks);
  for (auto& e : d.entries) nb[e.black].push_back({e.white, e.weight});
  std::vector<int> m(d.num_blacks, -1);
  std::vector<char> used(d.num_whites(), 0);
  std::function<void(int, double)> rec = [&](int b, double w) {
    if (b == d.num_blacks) {
      out[m] += w;
      return;
    }
    for (auto [x, wt] : nb[b]) {
      if (used[x]) continue;
      used[x] = 1;
      m[b] = x;
      rec(b + 1, w * wt);
      used[x] = 0;
    }
  };
  rec(0, 1.0);
  return out;
}

void normalize(std::map<std::vector<int>, double>& m) {
  double z = 0;
  for (auto& [k, v] : m) z += v;
  for (auto& [k, v] : m) v /= z;
}

void check_pushforward(const TGraph& g) {
  auto arr = build_faces(g);
  auto fr = standalone_frame(g, arr);
  auto d = to_dimer_graph(g, arr);
  auto trees = enumerate_trees(g);
  ASSERT_FALSE(trees.empty());
  std::map<std::vector<int>, double> push;
  for (auto& [next, w] : trees) {
    ust::SpanningTree t;
    t.next = next;
    auto tm = ust::tree_to_matching(g, t, fr);
    std::vector<int> m(g.num_segments());
    for (int s = 0; s < g.num_segments(); ++s) m[s] = tm.black_node[s];
    push[m] += w;
  }
  auto dim = enumerate_dimers(d);
  normalize(push);
  normalize(dim);
  EXPECT_EQ(push.size(), dim.size());
  for (auto& [m, p] : dim) {
    auto it = push.find(m);
    ASSERT_NE(it, push.end());
    EXPECT_NEAR(it->second, p, 1e-12);
  }
}

}  // namespace

TEST(Ust, SingleVertexEdgeLaw) {
  auto g = TGraph::from_segments({{{-1, 0}, {2, 0}}, {{0, 0}, {0, 1}}}, {{-1, 0}, {2, 0}, {0, 1}});
  int v = -1;
  for (int k = 0; k < g.num_vertices(); ++k)
    if (!g.boundary[k]) v = k;
  walk::JumpTable jt(g);
  const int N = 10000;
  int near = 0;
  for (int i = 0; i < N; ++i) {
    auto t = ust::wilson_sample(g, jt, 11, i);
    near += g.points[t.next[v]] == cplx(-1, 0);
  }
  const double p = 2.0 / 3, sd = std::sqrt(p * (1 - p) / N);
  EXPECT_NEAR(static_cast<double>(near) / N, p, 3 * sd);
}

TEST(Ust, NoBoundaryIsAnError) {
  auto g = fixtures::pinwheel();
  g.boundary.assign(g.num_vertices(), 0);
  g.finalize();
  try {
    ust::wilson_sample(g, 1);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), "NoBoundary");
  }
}

TEST(Ust, PinwheelTreeFrequencies) {
  auto g = fixtures::pinwheel();
  auto trees = enumerate_trees(g);
  ASSERT_EQ(trees.size(), 7u);
  double z = 0;
  std::map<std::vector<int>, double> exact;
  for (auto& [n, w] : trees) {
    exact[n] = w;
    z += w;
  }
  walk::JumpTable jt(g);
  std::map<std::vector<int>, int> freq;
  const int N = 20000;
  for (int i = 0; i < N; ++i) {
    auto t = ust::wilson_sample(g, jt, 5, i);
    ASSERT_TRUE(ust::is_valid_tree(g, t));
    ++freq[t.next];
  }
  for (auto& [n, w] : exact) {
    const double p = w / z, sd = std::sqrt(p * (1 - p) / N);
    EXPECT_NEAR(static_cast<double>(freq[n]) / N, p, 4 * sd);
  }
}

TEST(Ust, RandomGraphTreeFrequencies) {
  auto g = fixtures::random_tgraph(3, 2);
  auto trees = enumerate_trees(g);
  double z = 0;
  std::map<std::vector<int>, double> exact;
  for (auto& [n, w] : trees) {
    exact[n] = w;
    z += w;
  }
  ASSERT_GT(exact.size(), 7u);
  walk::JumpTable jt(g);
  std::map<std::vector<int>, int> freq;
  const int N = 20000;
  for (int i = 0; i < N; ++i) ++freq[ust::wilson_sample(g, jt, 9, i).next];
  int worst_bad = 0;
  for (auto& [n, w] : exact) {
    const double p = w / z, sd = std::sqrt(p * (1 - p) / N);
    worst_bad += std::abs(static_cast<double>(freq[n]) / N - p) > 4 * sd;
  }
  EXPECT_EQ(worst_bad, 0);
}

TEST(Ust, PushforwardIsDimerMeasure) {
  check_pushforward(fixtures::pinwheel());
  for (uint64_t seed : {1, 2, 3, 4}) check_pushforward(fixtures::random_tgraph(seed, 2));
}

TEST(Ust, SampledTreesMapToPerfectMatchings) {
  planar::PlanarParams p;
  p.B = {1.1, 0.1};
  p.C = {0.35, 0.9};
  p.lambda = std::polar(1.0, 0.4);
  auto patch = planar::build_whole_plane_patch(p, planar::Window::disk(0, 7), 1.0);
  const auto& g = patch.graph;
  auto arr = build_faces(g);
  auto fr = standalone_frame(g, arr);
  walk::JumpTable jt(g);
  for (int i = 0; i < 200; ++i) {
    auto t = ust::wilson_sample(g, jt, 2, i);
    std::string why;
    ASSERT_TRUE(ust::is_valid_tree(g, t, &why)) << why;
    auto m = ust::tree_to_matching(g, t, fr);
    for (int s = 0; s < g.num_segments(); ++s) ASSERT_GE(m.black_node[s], 0);
    for (int n = 0; n < fr.num_nodes; ++n)
      if (n != fr.root) ASSERT_GE(m.node_black[n], 0);
  }
}

TEST(Ust, CyclicConfigurationIsStructuralError) {
  auto g = fixtures::pinwheel();
  auto arr = build_faces(g);
  auto fr = standalone_frame(g, arr);
  ust::SpanningTree t;
  t.next.assign(g.num_vertices(), -1);
  // A -> B -> C -> A around the triangle
  for (int v = 0; v < g.num_vertices(); ++v)
    if (!g.boundary[v]) t.next[v] = g.segments[g.host(v)].back();
  ASSERT_FALSE(ust::is_valid_tree(g, t));
  try {
    ust::tree_to_matching(g, t, fr);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), "StructuralError");
  }
}

TEST(Ust, StandardPaths) {
  // chord 0 --- 1 -- 1.1 --- 2 with the short piece [1, 1.1]
  auto g = TGraph::from_segments({{{0, 0}, {2, 0}}, {{1, 0}, {1, 1}}, {{1.1, 0}, {1.1, -1}}},
                                 {{0, 0}, {2, 0}, {1, 1}, {1.1, -1}});
  auto at = [&](double x) {
    for (int v = 0; v < g.num_vertices(); ++v)
      if (std::abs(g.points[v] - cplx(x, 0)) < 1e-9) return v;
    return -1;
  };
  EXPECT_THROW(ust::is_standard(g, std::vector<int>{at(1), at(0)}), Error);
  g.piece_short.assign(g.num_pieces(), 0);
  EXPECT_TRUE(ust::is_standard(g, std::vector<int>{at(1), at(0)}));
  g.piece_short[g.piece_between(at(1), at(1.1))] = 1;
  // at the start a short jump is available and must be taken
  EXPECT_FALSE(ust::is_standard(g, std::vector<int>{at(1), at(0)}));
  EXPECT_TRUE(ust::is_standard(g, std::vector<int>{at(1), at(1.1), at(2)}));
  // after a short jump along the same segment a long jump is allowed
  EXPECT_TRUE(ust::is_standard(g, std::vector<int>{at(1.1), at(1), at(0)}));
}

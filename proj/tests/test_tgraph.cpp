#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "tiling/io.hpp"

using namespace tiling;

namespace {
bool has_kind(const ValidationReport& r, const std::string& k) {
  for (const auto& v : r.violations)
    if (v.kind == k) return true;
  return false;
}
}  // namespace

TEST(TGraph, CrossingSegmentsAreNotDisjoint) {
  auto g = TGraph::from_segments({{{-1, 0}, {1, 0}}, {{0, -1}, {0, 1}}}, {{-1, 0}, {1, 0}, {0, -1}, {0, 1}});
  EXPECT_TRUE(has_kind(validate_tgraph(g), "not disjoint"));
}

TEST(TGraph, DanglingEndpoint) {
  auto g = TGraph::from_segments({{{0, 0}, {1, 0}}}, {{0, 0}});
  EXPECT_TRUE(has_kind(validate_tgraph(g), "dangling endpoint"));
}

TEST(TGraph, DisconnectedAndInteriorBoundaryPoint) {
  auto g = TGraph::from_segments({{{0, 0}, {1, 0}}, {{0, 1}, {1, 1}}}, {{0, 0}, {1, 0}, {0, 1}, {1, 1}});
  EXPECT_TRUE(has_kind(validate_tgraph(g), "not connected"));
  auto h = TGraph::from_segments({{{0, 0}, {1, 0}}}, {{0, 0}, {1, 0}, {0.5, 0}});
  EXPECT_TRUE(has_kind(validate_tgraph(h), "not disjoint"));
}

TEST(TGraph, SingleSegment) {
  auto g = TGraph::from_segments({{{0, 0}, {2, 0}}}, {{0, 0}, {2, 0}});
  EXPECT_TRUE(validate_tgraph(g).ok());
  auto arr = build_faces(g);
  EXPECT_EQ(arr.faces.size(), 0u);
  EXPECT_EQ(arr.euler_V - arr.euler_E + arr.euler_F, 2);
  auto d = to_dimer_graph(g, arr);
  EXPECT_EQ(d.num_blacks, 1);
  EXPECT_EQ(d.num_whites(), 1);
  EXPECT_NEAR(d.weight(0, 0), 2.0, 1e-12);
}

TEST(TGraph, PinwheelIsValidWithOneFace) {
  auto g = fixtures::pinwheel();
  auto rep = validate_tgraph(g);
  for (auto& v : rep.violations) ADD_FAILURE() << v.kind << " " << v.detail;
  EXPECT_EQ(g.num_vertices(), 6);
  EXPECT_EQ(g.num_pieces(), 6);
  auto arr = build_faces(g);
  ASSERT_EQ(arr.faces.size(), 1u);
  EXPECT_NEAR(arr.faces[0].area, 0.5 * 1 * 0.8, 1e-12);
  EXPECT_EQ(arr.faces[0].cycle.size(), 3u);
  EXPECT_EQ(arr.euler_V - arr.euler_E + arr.euler_F, 2);
  auto d = to_dimer_graph(g, arr);
  EXPECT_EQ(d.num_blacks, 3);
  EXPECT_EQ(d.num_whites(), 3);
  // each side of ABC fully bounds the face
  const cplx A{0, 0}, B{1, 0}, C{0.3, 0.8};
  EXPECT_NEAR(d.weight(0, 0), std::abs(B - A), 1e-12);
  EXPECT_NEAR(d.weight(1, 0), std::abs(C - B), 1e-12);
  EXPECT_NEAR(d.weight(2, 0), std::abs(A - C), 1e-12);
  EXPECT_EQ(d.weight(0, 99), 0.0);
}

TEST(TGraph, BoundaryCyclePositiveOrder) {
  auto g = fixtures::pinwheel();
  auto arr = build_faces(g);
  auto xs = boundary_cycle(g, arr);
  ASSERT_EQ(xs.size(), 3u);
  double turn = 0;
  for (int i = 0; i < 3; ++i) turn += cross(g.points[xs[i]], g.points[xs[(i + 1) % 3]]);
  EXPECT_GT(turn, 0);
}

TEST(TGraph, FaceDimerInvariantsOnRandomGraphs) {
  for (uint64_t seed = 1; seed <= 30; ++seed) {
    auto g = fixtures::random_tgraph(seed, 1 + static_cast<int>(seed % 12));
    auto rep = validate_tgraph(g);
    ASSERT_TRUE(rep.ok()) << "seed " << seed << ": " << rep.violations[0].kind << " " << rep.violations[0].detail;
    auto arr = build_faces(g);
    EXPECT_EQ(arr.euler_V - arr.euler_E + arr.euler_F, 2);
    double area = 0;
    for (const auto& f : arr.faces) {
      EXPECT_GT(f.area, 0);
      area += f.area;
    }
    EXPECT_NEAR(area, -arr.outer.area, 1e-9 * std::abs(arr.outer.area));
    auto d = to_dimer_graph(g, arr);
    EXPECT_EQ(d.num_blacks, d.num_whites());
    // Every point of a segment is seen from its two sides, so the weights of
    // a segment not touching the root interval add up to twice its length.
    auto fr = standalone_frame(g, arr);
    for (int s = 0; s < g.num_segments(); ++s) {
      bool touches_root = false;
      for (size_t k = 0; k + 1 < g.segments[s].size(); ++k) {
        const int p = g.piece_offset(s) + static_cast<int>(k);
        touches_root |= fr.piece_left[p] == fr.root || fr.piece_right[p] == fr.root;
      }
      if (touches_root) continue;
      double sum = 0;
      for (const auto& e : d.entries)
        if (e.black == s) sum += e.weight;
      EXPECT_NEAR(sum, 2 * g.segment_length(s), 1e-9 * g.segment_length(s));
    }
  }
}

TEST(TGraph, LocateFace) {
  auto g = fixtures::pinwheel();
  auto arr = build_faces(g);
  EXPECT_EQ(locate_face(g, arr, {0.4, 0.2}), 0);
  EXPECT_EQ(locate_face(g, arr, {5, 5}), -1);
}

TEST(TGraph, CollinearOverlapRejected) {
  TGraph g;
  g.points = {{0, 0}, {2, 0}, {1, 0}, {3, 0}};
  g.segments = {{0, 2, 1}, {2, 1, 3}};
  g.boundary = {1, 0, 0, 1};
  g.finalize();
  EXPECT_THROW(build_faces(g), Error);
}

TEST(TGraph, JsonRoundTrip) {
  auto g = fixtures::random_tgraph(5, 6);
  auto j = io::tgraph_to_json(g);
  auto h = io::tgraph_from_json(nlohmann::json::parse(j.dump()));
  ASSERT_EQ(h.num_vertices(), g.num_vertices());
  ASSERT_EQ(h.segments, g.segments);
  EXPECT_EQ(h.boundary, g.boundary);
  for (int v = 0; v < g.num_vertices(); ++v) EXPECT_EQ(h.points[v], g.points[v]);
  EXPECT_THROW(io::tgraph_from_json(nlohmann::json{{"schema", "tg-0"}}), Error);
}

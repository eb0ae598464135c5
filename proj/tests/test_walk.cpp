#include <gtest/gtest.h>

#include <cmath>

#include "tiling/planar.hpp"
#include "tiling/walk.hpp"

using namespace tiling;

namespace {

// Horizontal chord [x0, x1] with a single interior vertex at x, made by a
// vertical segment ending on it.
TGraph chord_with_vertex(double x0, double x1, double x) {
  return TGraph::from_segments({{{x0, 0}, {x1, 0}}, {{x, 0}, {x, 1}}}, {{x0, 0}, {x1, 0}, {x, 1}});
}

int vertex_at(const TGraph& g, cplx z) {
  for (int v = 0; v < g.num_vertices(); ++v)
    if (std::abs(g.points[v] - z) < 1e-9) return v;
  return -1;
}

// Three segments ending at the origin, far ends on the boundary.
TGraph star(std::array<double, 3> len, std::array<double, 3> l) {
  std::vector<std::pair<cplx, cplx>> segs;
  std::vector<cplx> bnd;
  for (int i = 0; i < 3; ++i) {
    cplx far = std::polar(len[i], 2 * kPi * i / 3 + 0.1);
    segs.push_back({far, {0, 0}});
    bnd.push_back(far);
  }
  TGraph g = TGraph::from_segments(segs, bnd);
  DegenerateGeometry dg;
  dg.vertex = vertex_at(g, 0);
  for (int s = 0; s < 3; ++s) {
    dg.seg[s] = s;
    dg.l[s] = l[s];
  }
  g.degenerate_geometry.push_back(dg);
  return g;
}

planar::Patch scalene_patch(double radius, double mesh = 1.0) {
  planar::PlanarParams p;
  p.A = {0, 0};
  p.B = {1.1, 0.1};
  p.C = {0.35, 0.9};
  p.lambda = std::polar(1.0, 1.3);
  return planar::build_whole_plane_patch(p, planar::Window::disk(0, radius), mesh);
}

}  // namespace

TEST(Walk, TwoRateFormula) {
  auto g = chord_with_vertex(0, 1, 0.3);
  const int v = vertex_at(g, {0.3, 0});
  auto r = walk::transition_rates(g, v);
  ASSERT_EQ(r.size(), 2u);
  for (auto& x : r) {
    if (g.points[x.target] == cplx(0, 0)) EXPECT_NEAR(x.rate, 1 / 0.3, 1e-12);
    else EXPECT_NEAR(x.rate, 1 / 0.7, 1e-12);
  }
  auto h = chord_with_vertex(-0.5, 0.5, 0);
  for (auto& x : walk::transition_rates(h, vertex_at(h, 0))) EXPECT_NEAR(x.rate, 2.0, 1e-12);
  EXPECT_TRUE(walk::transition_rates(g, vertex_at(g, 0)).empty());
}

TEST(Walk, DegenerateRates) {
  auto g = star({1, 1, 1}, {1, 1, 1});
  const int o = vertex_at(g, 0);
  ASSERT_TRUE(g.degenerate(o));
  EXPECT_THROW(walk::transition_rates(g, o), Error);
  for (auto& r : walk::degenerate_rates(g, o)) EXPECT_NEAR(r.rate, 1.0 / 3, 1e-12);
  auto h = star({1, 1, 1}, {2, 1, 1});
  auto r = walk::degenerate_rates(h, vertex_at(h, 0));
  ASSERT_EQ(r.size(), 3u);
  EXPECT_NEAR(r[0].rate, 0.5, 1e-12);
  EXPECT_NEAR(r[1].rate, 0.25, 1e-12);
  EXPECT_NEAR(r[2].rate, 0.25, 1e-12);
  auto c = chord_with_vertex(0, 1, 0.3);
  EXPECT_THROW(walk::degenerate_rates(c, vertex_at(c, {0.3, 0})), Error);
  TGraph bare = star({1, 1, 1}, {1, 1, 1});
  bare.degenerate_geometry.clear();
  try {
    walk::degenerate_rates(bare, o);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), "MissingGeometry");
  }
}

TEST(Walk, MartingaleAndUnitSpeedAtEveryVertex) {
  auto patch = scalene_patch(10, 0.7);
  const auto& g = patch.graph;
  int checked = 0;
  for (int v = 0; v < g.num_vertices(); ++v) {
    if (g.boundary[v] || g.degenerate(v)) continue;
    cplx drift = 0;
    double speed = 0;
    for (auto& r : walk::transition_rates(g, v)) {
      const cplx d = g.points[r.target] - g.points[v];
      drift += r.rate * d;
      speed += r.rate * std::norm(d);
    }
    EXPECT_LT(std::abs(drift), 1e-12 * (1 + g.diameter()));
    EXPECT_NEAR(speed, 1.0, 1e-12);
    ++checked;
  }
  EXPECT_GT(checked, 300);
}

TEST(Walk, SeededPathsAreReproducible) {
  auto patch = scalene_patch(6);
  const auto& g = patch.graph;
  walk::JumpTable jt(g);
  int start = -1;
  double best = 1e300;
  for (int v = 0; v < g.num_vertices(); ++v)
    if (!g.boundary[v] && std::abs(g.points[v]) < best) best = std::abs(g.points[start = v]);
  walk::StopRule rule;
  rule.t_max = 5;
  auto a = walk::sample_path(g, jt, start, rule, 42, 7);
  auto b = walk::sample_path(g, jt, start, rule, 42, 7);
  auto c = walk::sample_path(g, jt, start, rule, 42, 8);
  EXPECT_EQ(a.vertices, b.vertices);
  EXPECT_EQ(a.times, b.times);
  EXPECT_NE(a.vertices, c.vertices);
  for (size_t i = 1; i < a.vertices.size(); ++i) EXPECT_GE(g.piece_between(a.vertices[i - 1], a.vertices[i]), 0);
}

TEST(Walk, MeanAndVarianceSpeed) {
  auto patch = scalene_patch(45);
  const auto& g = patch.graph;
  walk::JumpTable jt(g);
  int start = 0;
  double best = 1e300;
  for (int v = 0; v < g.num_vertices(); ++v)
    if (!g.boundary[v] && std::abs(g.points[v]) < best) best = std::abs(g.points[start = v]);
  walk::StopRule rule;
  rule.t_max = 100;
  walk::CovAccumulator acc;
  const int N = 3000;
  for (int i = 0; i < N; ++i) {
    auto p = walk::sample_path(g, jt, start, rule, 1, i);
    ASSERT_EQ(p.reason, walk::StopReason::TimeCap);
    acc.add(walk::position_at(g, p, 100) - g.points[start]);
  }
  auto cov = acc.covariance();
  const double tr = cov.trace();
  EXPECT_NEAR(tr / 100, 1.0, 0.06);
  const double se = std::sqrt(tr / N);
  EXPECT_LT(acc.mean.norm(), 4 * se);
}

TEST(Walk, ExitTimeTail) {
  auto patch = scalene_patch(14);
  const auto& g = patch.graph;
  walk::JumpTable jt(g);
  int start = 0;
  double best = 1e300;
  for (int v = 0; v < g.num_vertices(); ++v)
    if (!g.boundary[v] && std::abs(g.points[v]) < best) best = std::abs(g.points[start = v]);
  const double r = 4;
  walk::StopRule rule;
  rule.center = g.points[start];
  rule.radius = r;
  const int N = 2000;
  std::array<int, 5> late{};
  for (int i = 0; i < N; ++i) {
    auto p = walk::sample_path(g, jt, start, rule, 3, i);
    ASSERT_EQ(p.reason, walk::StopReason::ExitedRegion);
    for (int n = 1; n <= 4; ++n) late[n] += p.end_time >= 18 * n * r * r;
  }
  for (int n = 1; n <= 4; ++n) EXPECT_LE(static_cast<double>(late[n]) / N, std::pow(2.0, -n));
}

TEST(Walk, CovarianceEstimator) {
  EXPECT_THROW(walk::empirical_covariance(std::vector<cplx>{{1, 2}}), Error);
  std::vector<cplx> pts{{0, 0}, {2, 0}, {0, 2}, {2, 2}};
  auto c = walk::empirical_covariance(pts);
  EXPECT_NEAR(c(0, 0), 4.0 / 3, 1e-12);
  EXPECT_NEAR(c(0, 1), 0, 1e-12);
  // merging two halves equals one pass
  walk::CovAccumulator a, b, all;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> N(0, 1);
  for (int i = 0; i < 200; ++i) {
    cplx z{N(rng), 0.5 * N(rng) + 1};
    (i % 3 ? a : b).add(z);
    all.add(z);
  }
  a.merge(b);
  EXPECT_NEAR((a.covariance() - all.covariance()).norm(), 0, 1e-12);
  EXPECT_NEAR(walk::directional_variance(all.covariance(), {0, 1}), all.covariance()(1, 1), 1e-12);
}

#include <gtest/gtest.h>

#include "tiling/planar.hpp"

using namespace tiling;
using namespace tiling::planar;

namespace {
PlanarParams equilateral(double arg_lambda = 0) {
  PlanarParams p;
  p.lambda = std::polar(1.0, arg_lambda);
  return p;
}
PlanarParams scalene(double arg_lambda) {
  PlanarParams p;
  p.A = {0, 0};
  p.B = {1.3, 0.1};
  p.C = {0.4, 0.9};
  p.lambda = std::polar(1.0, arg_lambda);
  return p;
}
}  // namespace

TEST(Planar, FGExamples) {
  auto p = scalene(0.3);
  EXPECT_NEAR(std::abs(eval_FG(p, hex::white(0, 0)) - 1.0), 0, 1e-14);
  EXPECT_NEAR(std::abs(eval_FG(p, hex::black(0, 0)) - (p.C - p.B)), 0, 1e-14);
  EXPECT_NEAR(std::abs(eval_FG(p, hex::white(1, 0)) - (p.A - p.C) / (p.C - p.B)), 0, 1e-14);
  const cplx r1 = (p.A - p.C) / (p.C - p.B), r2 = (p.B - p.A) / (p.A - p.C);
  EXPECT_NEAR(std::abs(eval_FG(p, hex::white(-2, 3)) - std::pow(r1, -2) * std::pow(r2, 3)), 0, 1e-12);
  EXPECT_THROW(eval_FG(p, hex::dual(0, 0)), Error);
}

TEST(Planar, FGProductModulus) {
  auto p = scalene(0.3);
  for (int m = -30; m <= 30; m += 7)
    for (int n = -30; n <= 30; n += 5) {
      auto f = log_F(p, m, n), g = log_G(p, m, n);
      EXPECT_NEAR(std::exp(f.logmod + g.logmod), std::abs(p.C - p.B), 1e-9);
    }
}

TEST(Planar, FlatAndBadParamsRejected) {
  PlanarParams p;
  p.C = {2, 0};
  EXPECT_THROW(p.check(), Error);
  PlanarParams q;
  std::swap(q.B, q.C);
  EXPECT_THROW(q.check(), Error);
  PlanarParams r;
  r.lambda = 2;
  EXPECT_THROW(r.check(), Error);
  EXPECT_THROW(build_whole_plane_patch(p, Window::disk(0, 5), 1), Error);
}

TEST(Planar, PrimitiveClosesAroundDualFaces) {
  for (double al : {0.0, 0.4, 2.1}) {
    auto p = scalene(al);
    for (int m = -5; m <= 5; ++m)
      for (int n = -5; n <= 5; ++n) {
        // loop around the white face: v(m,n) -> v(m,n+1) -> v(m-1,n) -> v(m,n)
        cplx s = dual_increment(p, hex::dual(m, n), 0, 1) + dual_increment(p, hex::dual(m, n + 1), -1, -1) +
                 dual_increment(p, hex::dual(m - 1, n), 1, 0);
        EXPECT_NEAR(std::abs(s), 0, 1e-10);
        // around the black face: v(m,n) -> v(m+1,n+1) -> v(m,n+1) -> v(m,n)
        cplx t = dual_increment(p, hex::dual(m, n), 1, 1) + dual_increment(p, hex::dual(m + 1, n + 1), -1, 0) +
                 dual_increment(p, hex::dual(m, n + 1), 0, -1);
        EXPECT_NEAR(std::abs(t), 0, 1e-10);
      }
  }
}

TEST(Planar, WhiteImagesAreScaledRotatedDelta) {
  auto p = scalene(0.7);
  auto patch = build_whole_plane_patch(p, Window::disk(0, 8), 1.0);
  int checked = 0;
  for (int m = -3; m <= 3; ++m)
    for (int n = -3; n <= 3; ++n) {
      auto w = hex::white(m, n);
      auto z = white_triangle(patch, w);
      // corners v(m,n), v(m,n+1), v(m-1,n) sit across the a, c, b edges;
      // the image is 2 Re(lambda F) conj(lambda) Delta / F, a translate
      const cplx F = eval_FG(p, w);
      const cplx s = 2.0 * std::real(p.lambda * F) * std::conj(p.lambda) / F;
      std::array<cplx, 3> ref{s * p.A, s * p.B, s * p.C};
      // match up to translation by trying the three cyclic alignments
      double best = 1e300;
      for (int r = 0; r < 3; ++r) {
        double err = 0;
        for (int i = 0; i < 3; ++i)
          err += std::abs((z[i] - z[0]) - (ref[(i + r) % 3] - ref[r]));
        best = std::min(best, err);
      }
      EXPECT_LT(best, 1e-10);
      EXPECT_NEAR(std::abs(z[1] - z[0]) + std::abs(z[2] - z[1]) + std::abs(z[0] - z[2]),
                  2 * std::abs(std::real(p.lambda * F / std::abs(F))) *
                      (std::abs(p.A - p.B) + std::abs(p.B - p.C) + std::abs(p.C - p.A)),
                  1e-10);
      ++checked;
    }
  EXPECT_EQ(checked, 49);
}

TEST(Planar, DriftIsBounded) {
  for (double al : {0.0, 1.0}) {
    auto p = scalene(al);
    double prev = 0;
    for (double R : {10.0, 20.0, 40.0}) {
      auto patch = build_whole_plane_patch(p, Window::disk(0, R), 1.0);
      prev = std::max(prev, patch.max_drift_deviation);
    }
    EXPECT_LT(prev, 10 * p.max_side());
    // vertical line: |T(v(0,n)) - n(C-B)| bounded
    cplx t = 0;
    double worst = 0;
    for (int n = 0; n < 2000; ++n) {
      t += dual_increment(p, hex::dual(0, n), 0, 1);
      worst = std::max(worst, std::abs(t - static_cast<double>(n + 1) * (p.C - p.B)));
    }
    EXPECT_LT(worst, 20 * p.max_side());
  }
}

TEST(Planar, EquilateralPatchIsValidTGraph) {
  auto patch = build_whole_plane_patch(equilateral(0), Window::rect(0, 10, 10), 1.0);
  const auto& g = patch.graph;
  EXPECT_GT(g.num_segments(), 150);
  auto rep = validate_tgraph(g);
  for (auto& v : rep.violations) ADD_FAILURE() << v.kind << ": " << v.detail;
  auto arr = build_faces(g);
  EXPECT_EQ(arr.euler_V - arr.euler_E + arr.euler_F, 2);
  auto d = to_dimer_graph(g, arr);
  EXPECT_EQ(d.num_blacks, d.num_whites());
}

TEST(Planar, ScalenePatchesAreValid) {
  for (double al : {0.2, 1.3, 2.9}) {
    auto patch = build_whole_plane_patch(scalene(al), Window::disk({3, -2}, 12), 0.5);
    auto rep = validate_tgraph(patch.graph);
    for (auto& v : rep.violations) ADD_FAILURE() << v.kind << ": " << v.detail;
    auto arr = build_faces(patch.graph);
    EXPECT_EQ(arr.euler_V - arr.euler_E + arr.euler_F, 2);
    auto d = to_dimer_graph(patch.graph, arr);
    EXPECT_EQ(d.num_blacks, d.num_whites());
    auto geo = geometry_report(patch);
    EXPECT_LE(geo.overlap_area, 1e-9 * geo.total_white_area);
    EXPECT_EQ(geo.unclassified, 0);
    EXPECT_GT(geo.interior_of_one, 100);
  }
}

TEST(Planar, DegenerateWhiteIsFlagged) {
  // choose lambda so that Re(lambda F(w(0,0))) = 0
  auto p = scalene(kPi / 2);
  auto patch = build_whole_plane_patch(p, Window::disk(0, 6), 1.0);
  bool found = false;
  for (auto& w : patch.degenerate_whites) found |= w == hex::white(0, 0);
  EXPECT_TRUE(found);
  EXPECT_FALSE(patch.graph.degenerate_geometry.empty());
  auto geo = geometry_report(patch);
  EXPECT_GT(geo.endpoint_of_six, 0);
  PatchOptions opt;
  opt.perturb_lambda = true;
  auto q = build_whole_plane_patch(p, Window::disk(0, 6), 1.0, opt);
  EXPECT_TRUE(q.degenerate_whites.empty());
}

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "tiling/hexlattice.hpp"

using namespace tiling;
using namespace tiling::hex;

TEST(HexLattice, PlanePositionExamples) {
  EXPECT_NEAR(std::abs(plane_position(white(0, 0), 1.0) - kWhite0), 0, 1e-15);
  EXPECT_NEAR(std::abs(plane_position(dual(1, 0), 1.0) - (kDual0 + std::polar(1.0, -kPi / 6))), 0, 1e-15);
  EXPECT_NEAR(std::abs(plane_position(white(2, 3), 0.5) - (0.5 * (2.0 * e1 + 3.0 * e2) + kWhite0)), 0, 1e-15);
}

TEST(HexLattice, WhiteBlackHorizontalEdge) {
  for (int m = -3; m <= 3; ++m)
    for (int n = -3; n <= 3; ++n) {
      cplx d = plane_position(black(m, n)) - plane_position(white(m, n));
      EXPECT_NEAR(d.imag(), 0, 1e-14);
      EXPECT_NEAR(d.real(), kSqrt3 / 3, 1e-14);
    }
}

TEST(HexLattice, NeighboursAtUnitHexEdge) {
  for (auto w : {white(0, 0), white(4, -2)}) {
    std::set<int> types;
    for (auto b : black_neighbors(w)) {
      EXPECT_NEAR(std::abs(plane_position(b) - plane_position(w)), kSqrt3 / 3, 1e-14);
      EXPECT_EQ(kasteleyn_entry(w, b), 1);
      types.insert(static_cast<int>(edge_type(w, b)));
    }
    EXPECT_EQ(types.size(), 3u);
  }
  EXPECT_EQ(kasteleyn_entry(white(0, 0), black(5, 5)), 0);
  EXPECT_THROW(edge_type(white(0, 0), black(5, 5)), Error);
}

TEST(HexLattice, EdgeTypeFollowsDirection) {
  // type b edges point along +-e^{2i pi/3}
  cplx d = plane_position(black(-1, 0)) - plane_position(white(0, 0));
  EXPECT_NEAR(std::abs(std::abs(std::arg(d)) - 2 * kPi / 3), 0, 1e-12);
  EXPECT_EQ(edge_type(white(0, 0), black(-1, 0)), EdgeType::b);
}

TEST(HexLattice, FacesSurroundTheirVertex) {
  auto check = [](cplx c, std::array<HexCoord, 3> f) {
    double area = 0;
    for (int i = 0; i < 3; ++i) {
      cplx p = plane_position(f[i]), q = plane_position(f[(i + 1) % 3]);
      EXPECT_NEAR(std::abs(p - c), 1.0 / kSqrt3, 1e-12);
      area += cross(p - c, q - c);
    }
    EXPECT_GT(area, 0);
  };
  check(plane_position(white(2, 1)), white_face(white(2, 1)));
  check(plane_position(black(-1, 3)), black_face(black(-1, 3)));
}

TEST(HexLattice, DualCrossingsSeparateTheStep) {
  const HexCoord v = dual(3, -2);
  cplx pv = plane_position(v);
  for (auto u : dual_neighbors(v)) {
    auto c = dual_crossing(v, static_cast<int>(u.m - v.m), static_cast<int>(u.n - v.n));
    cplx d = plane_position(u) - pv;
    cplx mid = pv + 0.5 * d;
    cplx pw = plane_position(c.w), pb = plane_position(c.b);
    EXPECT_NEAR(std::abs(0.5 * (pw + pb) - mid), 0, 1e-12);
    EXPECT_EQ(kasteleyn_entry(c.w, c.b), 1);
    const int side = cross(d, pw - pv) > 0 ? 1 : -1;  // +1: white on the left
    EXPECT_EQ(side, c.sign);
  }
}

TEST(HexLattice, SlopeExamples) {
  auto s = slope_from_gradient(0, 0);
  EXPECT_NEAR(s.pa, 1.0 / 3, 1e-15);
  EXPECT_NEAR(s.pb, 1.0 / 3, 1e-15);
  EXPECT_NEAR(s.pc, 1.0 / 3, 1e-15);
  EXPECT_NEAR(slope_from_gradient(0, 1.0 / 6).pa, 0.5, 1e-15);
  EXPECT_THROW(slope_from_gradient(0, 0.7), Error);
  auto g = gradient_from_slope({0.5, 0.25, 0.25});
  EXPECT_NEAR(g[0], 0, 1e-15);
  EXPECT_NEAR(g[1], 1.0 / 6, 1e-15);
  auto z = gradient_from_slope({1.0 / 3, 1.0 / 3, 1.0 / 3});
  EXPECT_NEAR(std::hypot(z[0], z[1]), 0, 1e-15);
}

TEST(HexLattice, SlopeRoundTripProperty) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.02, 1);
  for (int i = 0; i < 100; ++i) {
    double a = U(rng), b = U(rng), c = U(rng), t = a + b + c;
    SlopeTriple s{a / t, b / t, c / t};
    auto g = gradient_from_slope(s);
    auto r = slope_from_gradient(g[0], g[1]);
    EXPECT_NEAR(r.pa, s.pa, 1e-12);
    EXPECT_NEAR(r.pb, s.pb, 1e-12);
    EXPECT_NEAR(r.pc, s.pc, 1e-12);
    EXPECT_NEAR(r.pa + r.pb + r.pc, 1, 1e-12);
    EXPECT_TRUE(r.liquid(0.01));
  }
}

TEST(HexLattice, PlanePositionInjective) {
  for (auto role : {Role::White, Role::Black, Role::Dual}) {
    std::set<std::pair<long long, long long>> seen;
    for (int m = -10; m <= 10; ++m)
      for (int n = -10; n <= 10; ++n) {
        cplx p = plane_position({m, n, role});
        EXPECT_TRUE(seen.insert({std::llround(p.real() * 1e6), std::llround(p.imag() * 1e6)}).second);
      }
  }
}

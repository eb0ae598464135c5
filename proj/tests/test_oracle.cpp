#include <gtest/gtest.h>

#include "tiling/height.hpp"
#include <Eigen/Dense>

#include "tiling/oracle.hpp"

using namespace tiling;
using oracle::BigInt;

TEST(Oracle, SmallHexagons) {
  EXPECT_EQ(oracle::count_matchings(hexagon_region(1, 1, 1)), 2);
  EXPECT_EQ(oracle::count_matchings(hexagon_region(2, 2, 2)), 20);
  EXPECT_EQ(oracle::enumerate_matchings(hexagon_region(2, 2, 2)), 20u);
  EXPECT_EQ(oracle::macmahon(2, 2, 2), 20);
  EXPECT_EQ(oracle::macmahon(3, 3, 3), 980);
}

TEST(Oracle, HexagonCountsAgreeWithEnumerationAndProductFormula) {
  for (int a = 1; a <= 3; ++a)
    for (int b = 1; b <= 3; ++b)
      for (int c = 1; c <= 3; ++c) {
        auto g = hexagon_region(a, b, c);
        EXPECT_EQ(static_cast<int>(g.whites.size()), a * b + b * c + c * a);
        const BigInt det = oracle::count_matchings(g);
        EXPECT_EQ(det, BigInt(oracle::enumerate_matchings(g))) << a << b << c;
        EXPECT_EQ(det, oracle::macmahon(a, b, c));
      }
}

TEST(Oracle, UnbalancedRejected) {
  auto g = hexagon_region(2, 1, 1);
  auto W = g.whites;
  W.pop_back();
  auto h = HexSubgraph::from_coords(W, g.blacks);
  EXPECT_THROW(oracle::count_matchings(h), Error);
  EXPECT_THROW(oracle::enumerate_matchings(h), Error);
}

TEST(Oracle, RandomRegionsAreSimplyConnectedAndTileable) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 10; ++i) {
    auto g = random_region(rng, 3, 2, 3, 5);
    EXPECT_TRUE(simply_connected(g));
    const BigInt det = oracle::count_matchings(g);
    EXPECT_GT(det, 0);
    EXPECT_EQ(det, BigInt(oracle::enumerate_matchings(g)));
  }
}

TEST(Oracle, EdgeProbabilitiesMatchEnumeration) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 5; ++i) {
    auto g = i == 0 ? hexagon_region(1, 1, 1) : random_region(rng, 2, 3, 2, 3);
    auto p = oracle::edge_probabilities(g);
    std::vector<std::array<double, 3>> freq(g.whites.size(), {0, 0, 0});
    const uint64_t total = oracle::enumerate_matchings(g, [&](const HexMatching& m) {
      for (size_t w = 0; w < m.size(); ++w)
        for (int t = 0; t < 3; ++t)
          if (g.white_nb[w][t] == m[w]) freq[w][t] += 1;
    });
    for (size_t w = 0; w < g.whites.size(); ++w) {
      EXPECT_NEAR(p[w][0] + p[w][1] + p[w][2], 1.0, 1e-10);
      for (int t = 0; t < 3; ++t) {
        EXPECT_NEAR(p[w][t], freq[w][t] / static_cast<double>(total), 1e-10);
        EXPECT_GE(p[w][t], -1e-12);
      }
    }
  }
  auto g = hexagon_region(1, 1, 1);
  EXPECT_NEAR(oracle::edge_probability(g, 0, g.white_nb[0][0] >= 0 ? g.white_nb[0][0] : g.white_nb[0][1]), 0.5, 1e-12);
}

TEST(Oracle, GaugeWeightsLeaveProbabilitiesUnchanged) {
  auto g = hexagon_region(2, 3, 2);
  auto p0 = oracle::edge_probabilities(g);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.5, 2);
  std::vector<double> fw(g.whites.size()), fb(g.blacks.size());
  for (auto& x : fw) x = U(rng);
  for (auto& x : fb) x = U(rng);
  for (size_t w = 0; w < g.whites.size(); ++w)
    for (int t = 0; t < 3; ++t)
      if (g.white_nb[w][t] >= 0) g.weight[w][t] = fw[w] * fb[g.white_nb[w][t]];
  auto p1 = oracle::edge_probabilities(g);
  for (size_t w = 0; w < g.whites.size(); ++w)
    for (int t = 0; t < 3; ++t) EXPECT_NEAR(p0[w][t], p1[w][t], 1e-10);
}

TEST(Oracle, SingularRegion) {
  // two whites and two blacks that are pairwise non-adjacent
  auto g = HexSubgraph::from_coords({hex::white(0, 0), hex::white(10, 0)}, {hex::black(5, 5), hex::black(7, 7)});
  EXPECT_EQ(oracle::count_matchings(g), 0);
  EXPECT_THROW(oracle::edge_probabilities(g), Error);
}

TEST(Oracle, SingleHexagonHeightMoments) {
  auto g = hexagon_region(1, 1, 1);
  auto inner = g.interior_faces();
  ASSERT_EQ(inner.size(), 1u);
  // anchor at a boundary face
  hex::HexCoord base{};
  for (const auto& v : g.faces())
    if (!(v == inner[0])) {
      base = v;
      break;
    }
  auto mom = oracle::exact_height_moments(g, {inner[0]}, base);
  EXPECT_EQ(mom.matchings, 2u);
  // the two tilings differ by one unit at the centre
  EXPECT_NEAR(mom.cov[0][0], 0.25, 1e-12);
}

TEST(Oracle, HeightCovarianceIsPsd) {
  auto g = hexagon_region(2, 2, 3);
  auto faces = g.interior_faces();
  auto base = g.faces().front();
  auto mom = oracle::exact_height_moments(g, faces, base);
  Eigen::MatrixXd C(faces.size(), faces.size());
  for (size_t i = 0; i < faces.size(); ++i)
    for (size_t j = 0; j < faces.size(); ++j) C(i, j) = mom.cov[i][j];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
  EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
}

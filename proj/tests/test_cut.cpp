#include <gtest/gtest.h>

#include <cmath>

#include "tiling/cut.hpp"
#include "tiling/oracle.hpp"

using namespace tiling;

namespace {
planar::PlanarParams scalene(double arg) {
  planar::PlanarParams p;
  p.B = {1.1, 0.1};
  p.C = {0.35, 0.9};
  p.lambda = std::polar(1.0, arg);
  return p;
}
}  // namespace

TEST(Cut, NearestDualRoundTrip) {
  for (int m = -5; m <= 5; ++m)
    for (int n = -5; n <= 5; ++n) {
      auto v = hex::dual(m, n);
      EXPECT_EQ(cut::nearest_dual(hex::plane_position(v, 0.25) + cplx(0.02, -0.03), 0.25), v);
    }
}

TEST(Cut, FlatCutIsMatchableAndConsistent) {
  auto fc = cut::make_flat_cut(scalene(0.4), 4.5, 7);
  const auto& cd = fc.cut;
  auto rep = validate_tgraph(cd.gamma);
  for (auto& v : rep.violations) ADD_FAILURE() << v.kind << ": " << v.detail;
  EXPECT_EQ(cd.num_tilde_whites, cd.num_tilde_blacks);
  ASSERT_TRUE(cd.labeled);
  EXPECT_TRUE(cd.u_hex.balanced());
  EXPECT_TRUE(simply_connected(cd.u_hex));
  EXPECT_GT(oracle::count_matchings(cd.u_hex), 0);
  EXPECT_GT(cd.u_hex.whites.size(), 30u);
  for (int v : cd.loop) EXPECT_TRUE(cd.gamma.boundary[v]);
  auto wu = cut::weighted_u_hex(cd);
  walk::JumpTable jt(cd.gamma);
  for (int i = 0; i < 100; ++i) {
    auto t = ust::wilson_sample(cd.gamma, jt, 3, i);
    auto m = cut::hex_matching(cd, t);
    ASSERT_TRUE(is_perfect(cd.u_hex, m));
    for (size_t w = 0; w < m.size(); ++w) {
      int slot = -1;
      for (int s = 0; s < 3; ++s)
        if (wu.white_nb[w][s] == m[w]) slot = s;
      ASSERT_GE(slot, 0);
      EXPECT_GT(wu.weight[w][slot], 0);
    }
  }
}

TEST(Cut, WilsonMatchesOracleOnSmallCut) {
  auto fc = cut::make_flat_cut(scalene(1.1), 3.5, 1);
  const auto& cd = fc.cut;
  ASSERT_TRUE(cd.labeled);
  auto wu = cut::weighted_u_hex(cd);
  auto exact = oracle::edge_probabilities(wu);
  walk::JumpTable jt(cd.gamma);
  const int N = 4000;
  std::vector<std::array<int, 3>> hits(wu.whites.size(), {0, 0, 0});
  for (int i = 0; i < N; ++i) {
    auto m = cut::hex_matching(cd, ust::wilson_sample(cd.gamma, jt, 17, i));
    for (size_t w = 0; w < m.size(); ++w)
      for (int s = 0; s < 3; ++s) hits[w][s] += wu.white_nb[w][s] == m[w];
  }
  int edges = 0, bad = 0;
  for (size_t w = 0; w < wu.whites.size(); ++w)
    for (int s = 0; s < 3; ++s) {
      if (wu.white_nb[w][s] < 0) continue;
      const double p = exact[w][s], sd = std::sqrt(std::max(p * (1 - p), 1e-12) / N);
      ++edges;
      bad += std::abs(hits[w][s] / static_cast<double>(N) - p) > 4 * sd + 1e-12;
    }
  EXPECT_GT(edges, 20);
  EXPECT_LE(bad, edges / 20);
}

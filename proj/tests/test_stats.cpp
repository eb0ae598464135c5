#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "tiling/oracle.hpp"
#include "tiling/planar.hpp"
#include "tiling/stats.hpp"

using namespace tiling;
using namespace tiling::stats;

namespace {
planar::PlanarParams scalene(double arg) {
  planar::PlanarParams p;
  p.B = {1.1, 0.1};
  p.C = {0.35, 0.9};
  p.lambda = std::polar(1.0, arg);
  return p;
}

const cut::FlatCut& small_cut() {
  static const cut::FlatCut fc = cut::make_flat_cut(scalene(1.1), 3.5, 1);
  return fc;
}

// disk automorphism z -> e^{it} (z - a) / (1 - conj(a) z)
cplx automorphism(cplx z, cplx a, double t) { return std::polar(1.0, t) * (z - a) / (1.0 - std::conj(a) * z); }
}  // namespace

TEST(Stats, MomentsMergeMatchesSinglePass) {
  std::mt19937_64 rng(1);
  std::gamma_distribution<double> G(2.0, 1.5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(50 + trial * 7);
    for (auto& v : x) v = G(rng);
    Moments all;
    for (double v : x) all.add(v);
    // random split into three streams merged in a random order
    std::array<Moments, 3> part;
    std::uniform_int_distribution<int> P(0, 2);
    for (double v : x) part[P(rng)].add(v);
    Moments m = part[2];
    m.merge(part[0]);
    m.merge(part[1]);
    double mean = 0;
    for (double v : x) mean += v / x.size();
    for (int k = 2; k <= 4; ++k) {
      double direct = 0;
      for (double v : x) direct += std::pow(v - mean, k) / x.size();
      EXPECT_NEAR(all.central(k), direct, 1e-9 * std::abs(direct));
      EXPECT_NEAR(m.central(k), direct, 1e-9 * std::abs(direct));
    }
    EXPECT_NEAR(m.mean, mean, 1e-12);
  }
  EXPECT_THROW(Moments{}.central(5), Error);
}

TEST(Stats, MomentSetAveragesSites) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> N(0, 1);
  MomentSet all(3), a(3), b(3);
  std::array<Moments, 3> site;
  for (int i = 0; i < 200; ++i) {
    const std::vector<double> x{N(rng), 2 * N(rng), 0.5 * N(rng) + 1};
    all.add(x);
    (i % 3 ? a : b).add(x);
    for (int j = 0; j < 3; ++j) site[j].add(x[j]);
  }
  a.merge(b);
  MomentSet empty;
  empty.merge(a);
  for (int k = 2; k <= 4; ++k) {
    const double want = (site[0].central(k) + site[1].central(k) + site[2].central(k)) / 3;
    EXPECT_NEAR(all.central(k), want, 1e-12 * want);
    EXPECT_NEAR(a.central(k), want, 1e-9 * want);
    EXPECT_NEAR(empty.central(k), want, 1e-9 * want);
  }
  EXPECT_THROW(all.add({1.0}), Error);
  EXPECT_THROW(MomentSet{}.central(2), Error);
}

TEST(Stats, CovMatrixMergeMatchesSinglePass) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> N;
  CovMatrix a(3), b(3), all(3);
  for (int i = 0; i < 300; ++i) {
    Eigen::Vector3d x(N(rng), N(rng) + 0.5 * i / 300.0, N(rng));
    x[2] += x[0];
    (i % 4 ? a : b).add(x);
    all.add(x);
  }
  b.merge(a);
  EXPECT_LT((b.covariance() - all.covariance()).norm(), 1e-12);
  EXPECT_LT((b.mean - all.mean).norm(), 1e-12);
  MeanVector u(2), v(2);
  u.add(Eigen::Vector2d(1, 2));
  v.add(Eigen::Vector2d(3, 6));
  u.merge(v);
  EXPECT_NEAR(u.mean()[1], 4, 1e-15);
}

TEST(Stats, BootstrapIsDeterministicAndCoversTheEstimate) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> N(3, 2);
  std::vector<Moments> batches(40);
  for (int i = 0; i < 4000; ++i) batches[i / 100].add(N(rng));
  auto mean = [](const Moments& m) { return m.mean; };
  const Interval a = bootstrap_ci(batches, mean, 300, 9), b = bootstrap_ci(batches, mean, 300, 9);
  EXPECT_EQ(a.lo, b.lo);
  EXPECT_EQ(a.hi, b.hi);
  EXPECT_TRUE(a.contains(a.estimate));
  // width close to 2 * 1.96 * sd / sqrt(n)
  EXPECT_NEAR(a.hi - a.lo, 2 * 1.96 * 2 / std::sqrt(4000.0), 0.03);
  EXPECT_TRUE(a.contains(3));
}

TEST(Stats, ProportionInterval) {
  const Interval z = proportion_ci(0, 100);
  EXPECT_EQ(z.lo, 0);
  EXPECT_GT(z.hi, 0.02);
  EXPECT_LT(z.hi, 0.05);
  const Interval h = proportion_ci(50, 100);
  EXPECT_NEAR(h.estimate, 0.5, 1e-15);
  EXPECT_NEAR(h.lo + h.hi, 1, 1e-12);
}

TEST(Stats, WeightedFit) {
  const FitLine f = weighted_fit({0, 1, 2, 3}, {1, 3, 5, 7}, {0.1, 0.2, 0.1, 0.3});
  EXPECT_NEAR(f.slope, 2, 1e-12);
  EXPECT_NEAR(f.intercept, 1, 1e-12);
  EXPECT_NEAR(f.chi2, 0, 1e-20);
  EXPECT_NEAR(f.p_value, 1, 1e-12);
  // one degree of freedom with chi2 = 3.841 is the 5% point
  const FitLine g = weighted_fit({0, 1, 2}, {0, 1, 0}, {1, 1, 1});
  EXPECT_NEAR(g.chi2, 2.0 / 3, 1e-12);
  EXPECT_NEAR(g.p_value, std::erfc(std::sqrt(g.chi2 / 2)), 1e-12);
}

TEST(Stats, DiskGreenProperties) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-0.7, 0.7);
  for (int k = 0; k < 200; ++k) {
    const cplx u(U(rng), U(rng)), v(U(rng), U(rng)), a(0.5 * U(rng), 0.5 * U(rng));
    const double t = 3 * U(rng);
    EXPECT_NEAR(disk_green(u, v), disk_green(v, u), 1e-12);
    EXPECT_GT(disk_green(u, v), 0);
    EXPECT_NEAR(disk_green(automorphism(u, a, t), automorphism(v, a, t)), disk_green(u, v), 1e-10);
    EXPECT_NEAR(disk_green(u, std::polar(1.0, t)), 0, 1e-12);
  }
  EXPECT_NEAR(disk_green(0, 0.5), std::log(2.0) / (2 * kPi), 1e-15);
}

// Gaussian vectors with covariance kappa G + 0.3 I (off the diagonal G only).
TEST(Stats, GffFitRecoversProportionality) {
  std::vector<cplx> u;
  for (int k = 0; k < 8; ++k) u.push_back(std::polar(0.15 + 0.06 * k, 2.4 * k));
  const int n = static_cast<int>(u.size());
  const double kappa = 0.64;
  Eigen::MatrixXd C(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) C(i, j) = i == j ? kappa * disk_green(u[i], u[i] * 0.98) + 0.3 : kappa * disk_green(u[i], u[j]);
  const Eigen::MatrixXd L = Eigen::LLT<Eigen::MatrixXd>(C).matrixL();
  std::mt19937_64 rng(6);
  std::normal_distribution<double> N;
  std::vector<CovMatrix> batches(40, CovMatrix(n));
  for (int s = 0; s < 20000; ++s) {
    Eigen::VectorXd z(n);
    for (auto& x : z) x = N(rng);
    batches[s % 40].add(L * z);
  }
  const GffFit f = gff_covariance_fit(batches, u, 300, 3);
  EXPECT_EQ(f.pairs, 28);
  EXPECT_TRUE(f.kappa.contains(kappa));
  EXPECT_GT(f.correlation.lo, 0.9);
  EXPECT_TRUE(f.diagonal_dominant);
  EXPECT_NEAR(f.chi_fit, 1 / (2 * kPi * std::sqrt(f.kappa.estimate)), 1e-15);

  // relabeling the points permutes the covariance and leaves the fit unchanged
  std::vector<int> perm{3, 7, 0, 5, 1, 6, 2, 4};
  std::vector<cplx> up(n);
  for (int i = 0; i < n; ++i) up[i] = u[perm[i]];
  std::vector<CovMatrix> pb = batches;
  for (auto& b : pb) {
    CovMatrix c(n);
    c.n = b.n;
    for (int i = 0; i < n; ++i) {
      c.mean[i] = b.mean[perm[i]];
      for (int j = 0; j < n; ++j) c.m2(i, j) = b.m2(perm[i], perm[j]);
    }
    b = c;
  }
  const GffFit g = gff_covariance_fit(pb, up, 300, 3);
  EXPECT_NEAR(g.kappa.estimate, f.kappa.estimate, 1e-12);
  EXPECT_NEAR(g.correlation.estimate, f.correlation.estimate, 1e-12);
}

TEST(Stats, MomentScanSeparatesPolylogFromPowerLaw) {
  const std::vector<double> deltas{1.0 / 16, 1.0 / 32, 1.0 / 64};
  std::mt19937_64 rng(7);
  auto make = [&](auto sd_of) {
    std::vector<std::vector<Moments>> out;
    for (double d : deltas) {
      std::normal_distribution<double> N(0, sd_of(d));
      std::vector<Moments> b(40);
      for (int s = 0; s < 8000; ++s) b[s % 40].add(N(rng));
      out.push_back(b);
    }
    return out;
  };
  // variance 0.1 + 0.1 log(1/delta)
  const auto poly = make([](double d) { return std::sqrt(0.1 + 0.1 * std::log(1 / d)); });
  const MomentScan a = height_moment_scan(deltas, poly, 2, 300, 1);
  EXPECT_TRUE(a.power_law_rejected);
  EXPECT_GT(a.polylog.p_value, 0.001);
  EXPECT_NEAR(a.polylog.slope, 0.1, 0.02);
  for (auto& r : a.rows) EXPECT_TRUE(r.kurtosis.contains(3));
  // variance proportional to 1/delta
  const auto lin = make([](double d) { return std::sqrt(0.01 / d); });
  const MomentScan b = height_moment_scan(deltas, lin, 2, 300, 1);
  EXPECT_FALSE(b.power_law_rejected);
  EXPECT_TRUE(b.alpha.contains(1.0));
  const MomentScan c = height_moment_scan(deltas, poly, 4, 300, 1);
  EXPECT_GT(c.C_k, 0);
  EXPECT_THROW(height_moment_scan(deltas, poly, 3, 10, 1), Error);
}

TEST(Stats, MeanDeviationOfExactProfileIsConstantShift) {
  // per-face means delta^{-1} (h(x) + 0.2) give zero deviation after the best constant
  const double delta = 0.05;
  std::vector<cplx> pos;
  std::vector<char> bnd;
  for (int k = 0; k < 30; ++k) {
    pos.push_back(std::polar(0.03 * k, 0.7 * k));
    bnd.push_back(k % 3 == 0);
  }
  auto h = [](cplx z) { return 0.3 * z.real() - 0.1 * z.imag() * z.imag(); };
  std::vector<MeanVector> batches(20, MeanVector(30));
  for (auto& b : batches) {
    Eigen::VectorXd x(30);
    for (int k = 0; k < 30; ++k) x[k] = (h(pos[k]) + 0.2) / delta;
    b.add(x);
  }
  const DeviationRow r = mean_height_deviation(delta, batches, pos, bnd, h, 100, 1);
  EXPECT_LT(r.sup_all.hi, 1e-12);
  EXPECT_LT(r.sup_boundary.hi, 1e-12);
  DeviationRow big = r, small = r;
  big.delta = 0.1;
  big.sup_all = {0.2, 0.15, 0.25};
  small.delta = 0.05;
  small.sup_all = {0.1, 0.07, 0.13};
  EXPECT_TRUE(deviation_table({small, big}).shrinking);
  small.sup_all = {0.3, 0.28, 0.32};
  EXPECT_FALSE(deviation_table({small, big}).shrinking);
}

// log weight(m) - sign * sum_f h_m(f) log p_f does not depend on m.
TEST(Stats, FaceProductsCarryTheWeightOfAMatching) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> W(0.3, 3);
  const int sign = face_height_sign();
  EXPECT_EQ(std::abs(sign), 1);
  for (int trial = 0; trial < 6; ++trial) {
    HexSubgraph g = trial == 0 ? hexagon_region(2, 2, 2) : random_region(rng, 3, 2, 3, 4);
    for (auto& w : g.weight) w = {W(rng), W(rng), W(rng)};
    const FaceRatio fr = face_ratios(g);
    EXPECT_EQ(fr.faces.size(), g.interior_faces().size());
    const hex::HexCoord base = boundary_face(g, 0, 1);
    double first = std::nan("");
    int seen = 0;
    oracle::enumerate_matchings(g, [&](const HexMatching& m) {
      double logw = 0;
      for (size_t w = 0; w < m.size(); ++w)
        for (int s = 0; s < 3; ++s)
          if (g.white_nb[w][s] == m[w]) logw += std::log(g.weight[w][s]);
      const HexHeight h = height_from_matching(g, m, base);
      double L = 0;
      for (size_t f = 0; f < fr.faces.size(); ++f) L += h.value(fr.faces[f]) * fr.log_products[f];
      const double c = logw - sign * L;
      if (seen++ == 0) first = c;
      EXPECT_NEAR(c, first, 1e-10);
    });
    EXPECT_GT(seen, 1);
  }
}

TEST(Stats, IsotropyOnPlanarPatch) {
  const planar::Patch patch = planar::build_whole_plane_patch(scalene(0.9), planar::Window::disk(0, 16), 1.0);
  const int start = nearest_interior_vertex(patch.graph, 0);
  const IsotropyReport r = isotropy_test(patch.graph, start, 10, 4000, 5, 40, 16, 200);
  EXPECT_EQ(r.variances.size(), 16u);
  EXPECT_TRUE(r.ratio.contains(r.ratio.estimate));
  EXPECT_LT(r.ratio.lo, 1.15);
  // optional stopping: E|X_tau - X_0|^2 = E[tau]
  EXPECT_TRUE(r.diffusivity.contains(1.0)) << r.diffusivity.lo << " " << r.diffusivity.hi;
  EXPECT_GT(r.mean_exit_time, 80);
  const IsotropyReport again = isotropy_test(patch.graph, start, 10, 400, 5, 20, 16, 100);
  const IsotropyReport twice = isotropy_test(patch.graph, start, 10, 400, 5, 20, 16, 100);
  EXPECT_EQ(again.ratio.lo, twice.ratio.lo);
  EXPECT_EQ(again.variances, twice.variances);
  EXPECT_THROW(isotropy_test(patch.graph, start, 40, 10, 5, 2), Error);
}

TEST(Stats, SampledHeightsIndependentOfThreads) {
  const auto& cd = small_cut().cut;
  const hex::HexCoord base = boundary_face(cd.u_hex, 0, 1);
  const hex::HexCoord mid = central_face(cd.u_hex);
  auto run = [&](int threads) {
    std::vector<double> v(200);
    sample_heights(cd, 200, 10, 3, threads, base,
                   [&](int, int i, const ust::SpanningTree&, const HexMatching&, const HexHeight* h) {
                     v[i] = h->value(mid);
                   });
    return v;
  };
  EXPECT_EQ(run(1), run(3));
}

// Sampled height moments against enumeration under the U-tilde weights.
TEST(Stats, SampledMomentsMatchWeightedEnumeration) {
  const auto& cd = small_cut().cut;
  const HexSubgraph wu = cut::weighted_u_hex(cd);
  const hex::HexCoord base = boundary_face(cd.u_hex, 0, 1);
  const hex::HexCoord mid = central_face(cd.u_hex);
  double Z = 0, s1 = 0, s2 = 0;
  oracle::enumerate_matchings(wu, [&](const HexMatching& m) {
    double w = 1;
    for (size_t x = 0; x < m.size(); ++x)
      for (int s = 0; s < 3; ++s)
        if (wu.white_nb[x][s] == m[x]) w *= wu.weight[x][s];
    const double h = height_from_matching(wu, m, base).value(mid);
    Z += w;
    s1 += w * h;
    s2 += w * h * h;
  });
  const double mean = s1 / Z, var = s2 / Z - mean * mean;
  const int N = 4000;
  std::vector<Moments> b(20);
  sample_heights(cd, N, 20, 12, 1, base, [&](int k, int, const ust::SpanningTree&, const HexMatching&, const HexHeight* h) {
    ASSERT_TRUE(h);
    b[k].add(h->value(mid));
  });
  Moments all;
  for (auto& x : b) all.merge(x);
  EXPECT_NEAR(all.mean, mean, 4 * std::sqrt(var / N));
  EXPECT_NEAR(all.central(2), var, 5 * var * std::sqrt(2.0 / N));
}

TEST(Stats, MeasureComparisonOnFlatCut) {
  const cut::FlatCut fc = cut::make_flat_cut(scalene(0.4), 6, 7);
  const MeasureReport r = measure_comparison(fc.cut, 400, 2, 20, 100);
  EXPECT_GT(r.faces, 3);
  EXPECT_GT(r.boundary_layer_faces, 3);
  // flat T-graph weights are gauge equivalent to uniform away from the loop
  EXPECT_LT(r.max_face_dev, 1e-9);
  EXPECT_GT(r.boundary_layer_max_dev, 1e-3);
  EXPECT_LT(r.tv.hi, 1e-8);
  EXPECT_EQ(r.samples, 400);
}

TEST(Stats, ConfigValidation) {
  StatsConfig c;
  EXPECT_NO_THROW(c.validate());
  c.samples = 100;
  EXPECT_THROW(c.validate(), Error);
  c = StatsConfig{};
  c.deltas = {0.5, 2};
  EXPECT_THROW(c.validate(), Error);
}

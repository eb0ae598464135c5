#include <gtest/gtest.h>

#include <cmath>

#include "tiling/pipeline.hpp"

using namespace tiling;
using namespace tiling::shape;

namespace {
TestShapeParams curved_params() {
  TestShapeParams p;
  p.c1 = 0.15 * std::polar(1.0, 0.4);
  p.c2 = cplx(0, 0.05);
  return p;
}

const LimitShape& curved() {
  static const LimitShape s = make_test_shape(curved_params(), 129, 1);
  return s;
}

const Pipeline& pipeline16() {
  static const Pipeline p = run_pipeline(curved(), 1.0 / 16);
  return p;
}

double slope(const std::vector<double>& d, const std::vector<double>& v) {
  // least squares of log v against log d
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(d.size());
  for (size_t k = 0; k < d.size(); ++k) {
    const double x = std::log(d[k]), y = std::log(v[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}
}  // namespace

// The leading defect term is exactly of order delta^{N_M+2}; finite-delta
// slope estimates approach it from below.
TEST(Pipeline, DefectOrder) {
  const std::vector<double> deltas{1.0 / 8, 1.0 / 16, 1.0 / 32};
  for (int NM : {0, 1}) {
    std::vector<double> sup;
    for (double d : deltas) {
      const FGField fg = build_FG_discrete(curved(), d, NM);
      const DefectReport r = black_defect(fg, 0.8);
      EXPECT_GT(r.count, 100);
      sup.push_back(r.sup);
    }
    EXPECT_GT(slope(deltas, sup), NM + 2 - 0.05) << "N_M = " << NM;
  }
}

TEST(Pipeline, ConstantShapeGivesPlanarFamily) {
  LimitShape s = make_test_shape(TestShapeParams{}, 65, 1);
  const double delta = 1.0 / 8;
  const FGField fg = build_FG_discrete(s, delta, 1);
  EXPECT_LT(black_defect(fg, 1).sup, 1e-12);
  EXPECT_LT(white_defect(fg, 1).sup, 1e-12);
  // triangle (Phi, 0, 1)
  planar::PlanarParams pp;
  pp.A = std::polar(1.0, kPi / 3);
  pp.B = 0;
  pp.C = 1;
  const auto& w0 = fg.whites[0];
  const auto f0 = planar::log_F(pp, w0.m, w0.n);
  for (size_t k = 0; k < fg.whites.size(); k += 7) {
    const auto& w = fg.whites[k];
    const auto f = planar::log_F(pp, w.m, w.n);
    const cplx want = std::polar(std::exp(f.logmod - f0.logmod), f.arg - f0.arg);
    EXPECT_NEAR(std::abs(std::exp(fg.logF[k] - fg.logF[0]) - want), 0, 1e-9 * std::abs(want));
  }
  const auto& b0 = fg.blacks[0];
  const auto g0 = planar::log_G(pp, b0.m, b0.n);
  for (size_t k = 0; k < fg.blacks.size(); k += 7) {
    const auto& b = fg.blacks[k];
    const auto g = planar::log_G(pp, b.m, b.n);
    const cplx want = std::polar(std::exp(g.logmod - g0.logmod), g.arg - g0.arg);
    EXPECT_NEAR(std::abs(std::exp(fg.logG[k] - fg.logG[0]) - want), 0, 1e-9 * std::abs(want));
  }
}

TEST(Pipeline, ProjectionIsSmallAndExact) {
  for (double d : {1.0 / 8, 1.0 / 16}) {
    FGField fg = build_FG_discrete(curved(), d, 1);
    const ProjectionReport r = project_discrete_holomorphic(fg);
    EXPECT_LT(r.defect_after, 1e-12);
    // relative changes of the order of the defect
    EXPECT_LT(r.max_rel_change_F, 50 * d * d * d);
    EXPECT_LT(r.max_rel_change_G, 50 * d * d * d);
  }
}

TEST(Pipeline, LambdaChoice) {
  auto one = choose_lambda(std::vector<double>{0.7});
  EXPECT_NEAR(std::arg(one.lambda), -0.7, 1e-14);
  EXPECT_NEAR(one.margin, 1, 1e-14);
  auto two = choose_lambda(std::vector<double>{0, kPi / 2});
  EXPECT_NEAR(std::arg(two.lambda), -kPi / 4, 1e-14);
  EXPECT_NEAR(two.margin, std::sqrt(0.5), 1e-14);
  // arguments are taken modulo pi
  auto shifted = choose_lambda(std::vector<double>{0.7 + kPi, 0.7 - 3 * kPi});
  EXPECT_NEAR(std::arg(shifted.lambda), -0.7, 1e-12);
  std::vector<double> many;
  for (int k = 0; k < 90; ++k) many.push_back(k * kPi / 90);
  EXPECT_NEAR(choose_lambda(many).margin, std::sin(kPi / 180), 1e-12);
  EXPECT_THROW(choose_lambda(std::vector<double>{}), Error);
}

TEST(Pipeline, PsiClosesAndApproachesPhi) {
  const Pipeline& p = pipeline16();
  EXPECT_LT(p.psi.tree_residual, 1e-12);
  EXPECT_LT(p.psi.face_residual, 1e-12);
  EXPECT_GT(p.lambda.margin, 0);
  std::vector<double> dev;
  for (double d : {1.0 / 8, 1.0 / 16, 1.0 / 32}) {
    FGField fg = build_FG_discrete(curved(), d, 1);
    project_discrete_holomorphic(fg);
    const PsiMap psi = build_psi(fg, choose_lambda(fg).lambda, *curved().analytic);
    dev.push_back(audit_psi(psi, fg, *curved().analytic).max_psi_phi);
  }
  EXPECT_LT(dev[1], dev[0]);
  EXPECT_LT(dev[2], dev[1]);
  EXPECT_LT(dev[2], 0.06);
}

TEST(Pipeline, PsiGeometryAudit) {
  const PsiAudit& a = pipeline16().audit;
  EXPECT_GT(a.whites, 500);
  EXPECT_EQ(a.positive_whites, a.whites);
  EXPECT_GT(a.min_white_margin, 0);
  EXPECT_LT(a.overlap_area, 1e-10 * a.total_white_area);
  EXPECT_LT(a.worst_flatness, 1e-9);
  EXPECT_GT(a.min_vertex_separation, 0);
  EXPECT_GT(a.interior_of_one, 500);
  EXPECT_EQ(a.unclassified, 0);
}

TEST(Pipeline, CorrectionGivesValidLabeledTGraph) {
  const Pipeline& p = pipeline16();
  const Correction& c = p.correction;
  const ValidationReport rep = validate_tgraph(c.graph);
  EXPECT_TRUE(rep.ok()) << (rep.ok() ? "" : rep.violations[0].kind + " " + rep.violations[0].detail);
  EXPECT_EQ(c.merged_label_conflicts, 0);
  // shortening << long pieces << mesh
  EXPECT_LT(c.eps_short, 1e-3 * c.min_long);
  EXPECT_LT(c.min_long, p.fg.delta);
  EXPECT_LE(c.max_regrow, c.eps_short + 1e-12);
  EXPECT_GT(c.interior_segments, 500);
  EXPECT_GT(c.regular_segments, 0.95 * c.interior_segments);
  EXPECT_EQ(p.labels.labeled, p.labels.faces);
  EXPECT_TRUE(p.labels.inverse_consistent);
  for (int s = 0; s < c.graph.num_segments(); ++s) ASSERT_TRUE(c.graph.segment_label[s].has_value());
  const FaceProducts fp = face_weight_products(c.graph, p.arr, p.labels);
  EXPECT_GT(fp.faces, 500);
  EXPECT_LT(fp.max_dev, 1e-9);
}

TEST(Pipeline, RegrowthOrderDoesNotMatterForExactData) {
  const Pipeline& p = pipeline16();
  CorrectionParams cp;
  for (auto it = p.fg.blacks.rbegin(); it != p.fg.blacks.rend(); ++it) cp.order.push_back(*it);
  const Correction c = correct_to_tgraph(p.psi, p.fg, cp);
  EXPECT_EQ(c.graph.num_vertices(), p.correction.graph.num_vertices());
  EXPECT_EQ(c.graph.num_pieces(), p.correction.graph.num_pieces());
  EXPECT_TRUE(validate_tgraph(c.graph).ok());
}

TEST(Pipeline, UnprojectedDataNeedsShortPieces) {
  PipelineOptions opt;
  opt.project = false;
  const Pipeline p = run_pipeline(curved(), 1.0 / 16, opt);
  EXPECT_GT(p.psi.face_residual, 1e-9);
  EXPECT_TRUE(validate_tgraph(p.correction.graph).ok());
  EXPECT_GT(p.correction.short_pieces, 0);
  const FaceProducts fp = face_weight_products(p.correction.graph, p.arr, p.labels);
  EXPECT_GT(fp.max_dev, 1e-9);
  EXPECT_LT(fp.max_dev, 1e-2);
}

TEST(Pipeline, OversizedShorteningRejected) {
  const Pipeline& p = pipeline16();
  CorrectionParams cp;
  cp.eps_short = 1.0;
  EXPECT_THROW(correct_to_tgraph(p.psi, p.fg, cp), Error);
}

TEST(Pipeline, CurvedCutDomain) {
  const Pipeline& p = pipeline16();
  const CurvedCut cc = curved_cut_domain(p, *curved().analytic, 0.7, 11);
  EXPECT_TRUE(cc.simply_connected);
  EXPECT_TRUE(cc.matchable);
  EXPECT_GT(cc.cut.u_hex.whites.size(), 200u);
  EXPECT_TRUE(cc.cut.u_hex.balanced());
  EXPECT_LE(cc.hausdorff, 3 * p.fg.delta);
  EXPECT_LT(cc.boundary_deviation, 0.1);
}

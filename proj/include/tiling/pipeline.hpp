#pragma once

#include <unordered_map>
#include <vector>

#include "tiling/cut.hpp"
#include "tiling/planar.hpp"
#include "tiling/shape.hpp"
#include "tiling/tgraph.hpp"

namespace tiling::shape {

// F on the whites and G on the blacks of the mesh-delta lattice inside
// |phi| < radius, stored as complex logarithms (the factors e^{-+H/delta} are
// unbounded while the products F(w)G(b) are not).
struct FGField {
  double delta = 0;
  int NM = 0;
  double radius = 1;
  std::vector<hex::HexCoord> whites, blacks;
  std::vector<cplx> white_pos, black_pos;  // lattice positions
  std::vector<cplx> white_phi, black_phi;  // phi at those positions
  std::vector<cplx> logF, logG;
  std::unordered_map<uint64_t, int> white_index, black_index;

  int find_white(const hex::HexCoord& w) const;
  int find_black(const hex::HexCoord& b) const;
  cplx product(int b, int w) const { return std::exp(logG[b] + logF[w]); }
};

// F(w) = e^{-H(w)/delta} sqrt(dphi/dy(w)) (1 + delta M1), G(b) = e^{H(w)/delta}
// sqrt(dphi/dy(w)) (1 - delta M1) with w the white left of b; M1 omitted when
// NM = 0. The square root is continued from its value at the center.
FGField build_FG_discrete(const LimitShape& s, double delta, int NM, double radius = 1.0);

struct DefectReport {
  double sup = 0;  // max |D|
  int count = 0;   // vertices measured
};
// D(b) = G(b) sum_w F(w) over blacks with three whites and |phi(b)| <= r.
DefectReport black_defect(const FGField& fg, double interior_radius);
// F(w) sum_b G(b) over whites with three blacks and |phi(w)| <= r.
DefectReport white_defect(const FGField& fg, double interior_radius);

struct ProjectionReport {
  double max_rel_change_F = 0, max_rel_change_G = 0;
  double defect_after = 0;  // max over all constrained vertices
  int iterations = 0;
};
// Smallest relative change of F (resp. G) making sum_w F(w) = 0 at every black
// with three whites (resp. sum_b G(b) = 0 at every white with three blacks), by
// conjugate gradients on the normal equations. NoConvergence.
ProjectionReport project_discrete_holomorphic(FGField& fg, double tol = 1e-14, int max_iter = 50000);

struct LambdaChoice {
  cplx lambda{1, 0};
  double margin = 0;  // min_w |Re(lambda F(w)/|F(w)|)|
};
// Gap search over the arguments modulo pi. Among equal gaps the smallest
// argument of lambda in (-pi/2, pi/2] wins. NoMargin.
LambdaChoice choose_lambda(const std::vector<double>& arguments);
LambdaChoice choose_lambda(const FGField& fg);

// Omega(bw) = 2 delta conj(lambda) Re(lambda F(w)) G(b).
cplx omega(const FGField& fg, int w, int b, cplx lambda);

struct PsiMap {
  double delta = 0;
  cplx lambda{1, 0};
  hex::HexCoord root;
  std::unordered_map<uint64_t, cplx> value;  // dual hex_key -> psi
  std::unordered_map<uint64_t, hex::HexCoord> coord;
  double tree_residual = 0;  // max |psi(v') - psi(v) - Omega-increment| over non-tree dual edges
  double face_residual = 0;  // max |sum of increments| around a white or black face
  bool has(const hex::HexCoord& v) const { return value.count(hex_key(v)) > 0; }
  cplx at(const hex::HexCoord& v) const { return value.at(hex_key(v)); }
};

// psi integrated over a breadth-first tree of dual edges from the dual vertex
// nearest to the center, with psi(root) = phi(root).
PsiMap build_psi(const FGField& fg, cplx lambda, const TestShape& t);

struct PsiAudit {
  int whites = 0, positive_whites = 0;
  double min_white_margin = 0;     // min over whites of cross/(|.|^2) shape quality
  int blacks = 0;
  double worst_flatness = 0;       // max over blacks of inscribed diameter / shortest side
  double overlap_area = 0, total_white_area = 0;
  double min_vertex_separation = 0;
  int interior_of_one = 0, unclassified = 0;
  double max_psi_phi = 0;          // sup |psi - phi| over dual vertices
};
PsiAudit audit_psi(const PsiMap& psi, const FGField& fg, const TestShape& t);

struct CorrectionParams {
  double eps_short = -1;   // <= 0: automatic
  std::vector<hex::HexCoord> order;  // regrowth order of blacks; empty: by (n, m)
  double max_regrow_factor = 100;    // growth cap, in units of eps_short
  double short_factor = 8;           // pieces up to short_factor * eps_short are short
};

struct Correction {
  TGraph graph;
  double eps_short = 0;
  double max_regrow = 0;       // longest growth of an attached end
  double min_long = 0, max_short = 0;
  int short_pieces = 0;
  int pruned_segments = 0;
  int interior_segments = 0;   // segments with no boundary vertex
  int regular_segments = 0;    // of those: two long pieces, <= 3 short, no two short adjacent
  int merged_label_conflicts = 0;
};

// Segments from the black triangles of psi: extremal chord, shortened by
// eps_short on both sides, regrown in order until they hit an earlier segment
// or a shortened one, within max_regrow_factor * eps_short. Ends that hit
// nothing stay shortened and become boundary points; segments with a boundary
// point off the outer face are pruned. OverlapAfterShortening.
Correction correct_to_tgraph(const PsiMap& psi, const FGField& fg, const CorrectionParams& params = {});

struct HexLabeling {
  std::vector<std::optional<hex::HexCoord>> face_white;
  int faces = 0, labeled = 0;
  bool inverse_consistent = true;
  // Labeled faces whose white's three blacks are all segments of the graph.
  int full_faces = 0;
};
// Faces to whites by their corner labels (LabelConflict), segments to blacks
// by segment_label.
HexLabeling identify_hex_subgraph(const TGraph& g, const Arrangement& arr);

// Alternating products prod w(b_i,w_i)/w(b_i,w_{i+1}) of T-graph weights
// around every lattice face whose six edges are present in the graph's
// dimer graph; returns max |product - 1|.
struct FaceProducts {
  int faces = 0;
  double max_dev = 0;
  std::vector<double> values;
};
FaceProducts face_weight_products(const TGraph& g, const Arrangement& arr, const HexLabeling& lab);

struct PipelineOptions {
  int NM = 1;
  bool project = true;
  CorrectionParams correction;
};

struct Pipeline {
  FGField fg;
  DefectReport defect;          // before projection, |phi| <= 0.8
  ProjectionReport projection;
  LambdaChoice lambda;
  PsiMap psi;
  PsiAudit audit;
  Correction correction;
  Arrangement arr;
  HexLabeling labels;
};
Pipeline run_pipeline(const LimitShape& s, double delta, const PipelineOptions& opt = {});

// Cut domain for U = phi^{-1}(disk of radius u_radius): the corridor follows
// the psi-image of the lattice curve bounding U.
struct CurvedCut {
  cut::Corridor corridor;
  cut::CutDomain cut;
  double hausdorff = 0;            // between U_hex vertex positions and U
  double boundary_deviation = 0;   // sup over boundary faces of |delta h - h^C| after the best constant
  bool simply_connected = false;
  bool matchable = false;
};
CurvedCut curved_cut_domain(const Pipeline& p, const TestShape& t, double u_radius, uint64_t seed,
                            double width_factor = 0.7);

}  // namespace tiling::shape

#pragma once

#include <map>
#include <vector>

#include "tiling/hexlattice.hpp"
#include "tiling/tgraph.hpp"

namespace tiling::planar {

// Triangle (A,B,C) in positive order and a unit lambda.
struct PlanarParams {
  cplx A{0, 0}, B{1, 0}, C{0.5, kSqrt3 / 2};
  cplx lambda{1, 0};
  // Throws Flat / Orientation / Lambda.
  void check() const;
  double max_side() const;
};

// log-modulus and argument of a complex number
struct LogPolar {
  double logmod = 0, arg = 0;
  cplx value() const { return std::polar(std::exp(logmod), arg); }
};

LogPolar log_F(const PlanarParams& p, int64_t m, int64_t n);
LogPolar log_G(const PlanarParams& p, int64_t m, int64_t n);

// F at a white or G at a black.
cplx eval_FG(const PlanarParams& p, const hex::HexCoord& c);

// Omega(bw) = 2 Re(lambda F(w)) conj(lambda) G(b), evaluated without
// forming F or G (their product is bounded while each factor is not).
cplx omega(const PlanarParams& p, const hex::HexCoord& w, const hex::HexCoord& b);

// T(v + step) - T(v), unit mesh.
cplx dual_increment(const PlanarParams& p, const hex::HexCoord& v, int dm, int dn);

struct Window {
  enum class Kind { Disk, Rect } kind = Kind::Disk;
  cplx center{0, 0};
  double radius = 10;            // disk
  double half_w = 10, half_h = 10;  // rectangle
  bool contains(cplx z) const;
  static Window disk(cplx c, double r) { return {Kind::Disk, c, r, 0, 0}; }
  static Window rect(cplx c, double hw, double hh) { return {Kind::Rect, c, 0, hw, hh}; }
};

struct PatchOptions {
  double eps_degen = 1e-8;      // relative to |Delta|
  bool perturb_lambda = false;  // rotate lambda by <= 1e-6 rad to escape exact degeneracy
};

struct Patch {
  PlanarParams params;
  double mesh = 1;
  TGraph graph;
  std::map<std::pair<int64_t, int64_t>, cplx> T;  // dual (m,n) -> mesh * T
  std::vector<hex::HexCoord> degenerate_whites;
  double max_drift_deviation = 0;  // sup |T(v(m,n)) - m(B-A) - n(C-B)|, unit mesh
  int pruned_segments = 0;
};

Patch build_whole_plane_patch(const PlanarParams& p, const Window& window, double mesh, const PatchOptions& opt = {});

struct GeometryReport {
  double overlap_area = 0;      // pairwise white-image overlap
  double total_white_area = 0;
  int interior_of_one = 0;      // dual vertices interior to one segment, endpoint of two
  int endpoint_of_six = 0;      // collapsed white
  int unclassified = 0;
  double max_drift_deviation = 0;
};

GeometryReport geometry_report(const Patch& patch);

// Area of the intersection of two counterclockwise convex polygons.
double convex_overlap(std::vector<cplx> P, const std::vector<cplx>& Q);

// The white image T(w) as a triangle (mesh units), from the dual corners.
std::array<cplx, 3> white_triangle(const Patch& patch, const hex::HexCoord& w);

}  // namespace tiling::planar

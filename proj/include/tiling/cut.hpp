#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "tiling/hexgraph.hpp"
#include "tiling/planar.hpp"
#include "tiling/tgraph.hpp"
#include "tiling/ust.hpp"

namespace tiling::cut {

// Tubular neighbourhood of a closed polyline in the T-graph plane.
struct Corridor {
  std::vector<cplx> curve;
  double width = 1;  // half-width
  cplx center{0, 0};  // a point enclosed by the curve, used to measure winding
  double distance(cplx z) const;
  bool contains(cplx z) const { return distance(z) < width; }
};

// Positions of dual vertices, keyed by hex_key.
using DualMap = std::unordered_map<uint64_t, cplx>;

// Dual vertex nearest to a lattice-plane point (mesh-scaled positions).
hex::HexCoord nearest_dual(cplx z, double mesh);

// Image of a closed lattice-plane polyline: every sample point is sent to the
// image of the nearest dual vertex. Throws OutOfRange if one is missing.
Corridor corridor_from_lattice_curve(const DualMap& image, double mesh, const std::vector<cplx>& curve, double width,
                                     cplx lattice_center);

// Circle of radius r around c, as an n-gon.
std::vector<cplx> circle(cplx c, double r, int n = 256);

struct LoopSearch {
  std::vector<int> loop;  // simple directed cycle of walk moves, winding once around the center
  bool used_fallback = false;
  int attempts = 0;
};

// Corridor-confined random walk with chronological loop erasure, stopped when
// the erased path closes a loop around the center; loops that are not
// standard are rejected. After max_attempts a breadth-first search over
// (vertex, forced-short, sheet) states is used. Throws CorridorFailure.
LoopSearch find_standard_loop(const TGraph& g, const Corridor& c, uint64_t seed, int max_attempts = 20,
                              long max_steps = 5'000'000);
std::vector<int> fallback_loop(const TGraph& g, const Corridor& c);

// Standardness of a cycle, read once around plus the closing move.
bool loop_is_standard(const TGraph& g, const std::vector<int>& loop);

struct CutDomain {
  // Inside of the loop with the loop vertices as boundary. Every loop piece is
  // its own segment; inside segments keep their inside part only.
  TGraph gamma;
  Arrangement arr;
  DualFrame frame;                 // bounded faces + root; loop pieces other than the closing one ignored
  std::vector<int> loop;           // gamma ids, closing move loop[0] -> loop[1]
  std::vector<int> source_vertex;  // gamma vertex -> source vertex
  std::vector<int> source_segment; // gamma segment -> source segment
  int w0 = -1;                     // gamma face behind the closing piece
  int b0 = -1;                     // gamma segment of the closing piece
  std::vector<char> inside_segment;  // gamma segment is a black of U-tilde

  // U-tilde: whites are the faces other than w0, blacks the inside segments;
  // Entry.white is a gamma face id, Entry.black a gamma segment id.
  std::vector<DimerGraph::Entry> u_tilde;
  int num_tilde_whites = 0, num_tilde_blacks = 0;

  // Lattice side, filled when vertex and segment labels are present.
  bool labeled = false;
  HexSubgraph u_hex;
  std::vector<int> face_white;     // gamma face -> u_hex white, -1 for w0
  std::vector<int> segment_black;  // gamma segment -> u_hex black, -1 if not inside
  hex::HexCoord w0_label, b0_label;

  bool used_fallback = false;
  int attempts = 0;
};

// White labels of faces from the dual labels of their corners (a face is the
// white whose three corners all appear on its cycle). LabelConflict if two fit.
std::vector<std::optional<hex::HexCoord>> label_faces_by_corners(const TGraph& g, const Arrangement& arr);

// Builds the cut from a simple cycle of source vertices; the closing edge is
// the first rotation whose segment has no inside part.
CutDomain cut_from_loop(const TGraph& g, const std::vector<int>& loop);

CutDomain cut_domain(const TGraph& g, const Corridor& c, uint64_t seed, int max_attempts = 20);

// U_hex carrying the U-tilde weights in its slots (0 where U-tilde has no
// edge). LabelMismatch if U-tilde has an edge absent from the honeycomb,
// unless drop_extra, in which case such edges are left out.
HexSubgraph weighted_u_hex(const CutDomain& cd, bool drop_extra = false);

// Matching of u_hex pushed forward from a spanning tree of gamma.
HexMatching hex_matching(const CutDomain& cd, const ust::SpanningTree& t);

// Whole-plane patch cut along a loop hugging the image of the lattice circle
// of the given radius (unit lattice) around the origin.
struct FlatCut {
  planar::Patch patch;
  Corridor corridor;
  CutDomain cut;
};
FlatCut make_flat_cut(const planar::PlanarParams& p, double lattice_radius, uint64_t seed, double width_factor = 1.5);

}  // namespace tiling::cut

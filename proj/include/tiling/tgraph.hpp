#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tiling/common.hpp"
#include "tiling/hexlattice.hpp"

namespace tiling {

// Shape of the collapsed white triangle behind a degenerate vertex: side
// lengths l[i] opposite to the incident segments seg[i].
struct DegenerateGeometry {
  int vertex = -1;
  std::array<int, 3> seg{-1, -1, -1};
  std::array<double, 3> l{0, 0, 0};
};

// A finite T-graph. Each segment is stored as the ordered list of vertex ids
// along its closure (first and last are the endpoints). Pieces are the edges
// between consecutive vertices of a segment.
class TGraph {
 public:
  std::vector<cplx> points;
  std::vector<std::vector<int>> segments;
  std::vector<char> boundary;  // per vertex
  double eps_geom = 1e-12;

  // Optional lattice labels (filled by the planar family and the construction).
  std::vector<std::optional<hex::HexCoord>> segment_label;  // black coordinate
  std::vector<std::optional<hex::HexCoord>> vertex_label;   // dual coordinate
  std::vector<DegenerateGeometry> degenerate_geometry;
  std::vector<char> piece_short;  // per piece, filled by the construction

  // Builds a graph from endpoint pairs and boundary points, merging endpoints
  // within eps and inserting T-junctions found geometrically.
  static TGraph from_segments(const std::vector<std::pair<cplx, cplx>>& segs,
                              const std::vector<cplx>& boundary_points, double eps_rel = 1e-9);

  // Recomputes every derived table; call after editing the public fields.
  void finalize();

  int num_vertices() const { return static_cast<int>(points.size()); }
  int num_segments() const { return static_cast<int>(segments.size()); }
  int num_pieces() const { return static_cast<int>(piece_seg_.size()); }
  double diameter() const;

  // Segment containing the vertex in its interior, or -1, and its position.
  int host(int v) const { return host_[v]; }
  int host_pos(int v) const { return host_pos_[v]; }
  bool degenerate(int v) const { return !boundary[v] && host_[v] < 0; }
  const std::vector<std::pair<int, int>>& incidences(int v) const { return incid_[v]; }

  // Piece k of segment s has global id piece_offset(s)+k and joins
  // segments[s][k] to segments[s][k+1].
  int piece_offset(int s) const { return piece_off_[s]; }
  int piece_segment(int p) const { return piece_seg_[p]; }
  std::pair<int, int> piece_ends(int p) const;
  double piece_length(int p) const;
  double segment_length(int s) const;
  // Piece joining adjacent vertices u,v along their common segment, or -1.
  int piece_between(int u, int v) const;

 private:
  std::vector<int> host_, host_pos_, piece_off_, piece_seg_;
  std::vector<std::vector<std::pair<int, int>>> incid_;
};

struct Face {
  int id = -1;
  std::vector<int> cycle;        // vertex ids, face on the left
  std::vector<int> half_edges;   // half-edge ids (2*piece + dir)
  double area = 0;               // signed; positive for bounded faces
  std::vector<cplx> polygon(const TGraph& g) const;
};

// Planar subdivision induced by the pieces. Half-edge 2p runs along the
// segment direction of piece p, 2p+1 against it.
struct Arrangement {
  std::vector<Face> faces;       // bounded faces, counterclockwise
  Face outer;
  std::vector<int> face_of_half_edge;  // index into faces, or -1 for outer
  int euler_V = 0, euler_E = 0, euler_F = 0;  // F counts the outer face
  int left_face(int p) const { return face_of_half_edge[2 * p]; }
  int right_face(int p) const { return face_of_half_edge[2 * p + 1]; }
};

Arrangement build_faces(const TGraph& g);

// Even-odd rule; points on the boundary may go either way.
bool point_in_polygon(const std::vector<cplx>& poly, cplx z);

// Returns the index of the bounded face containing the point, or -1.
int locate_face(const TGraph& g, const Arrangement& arr, cplx z);

struct Violation {
  std::string kind;  // "not disjoint", "not connected", "dangling endpoint", "boundary not on outer face", ...
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  std::vector<int> degenerate_vertices;
  bool ok() const { return violations.empty(); }
};

ValidationReport validate_tgraph(const TGraph& g, double tol = -1);

// Weighted bipartite graph of a T-graph: blacks are segments, whites are the
// bounded faces followed by the n-1 boundary whites.
struct DimerGraph {
  int num_blacks = 0;
  int num_face_whites = 0;
  int num_boundary_whites = 0;
  std::vector<std::pair<int, int>> boundary_pairs;  // boundary vertex ids (x_i, x_{i+1})
  struct Entry {
    int black, white;
    double weight;
  };
  std::vector<Entry> entries;
  int num_whites() const { return num_face_whites + num_boundary_whites; }
  double weight(int b, int w) const;
};

// Boundary vertices in positive order along the outer face.
std::vector<int> boundary_cycle(const TGraph& g, const Arrangement& arr);

DimerGraph to_dimer_graph(const TGraph& g, const Arrangement& arr);

// Exterior bookkeeping for the tree-to-dimer map: every piece knows the node
// on each side. Nodes are bounded faces followed by exterior nodes.
struct DualFrame {
  int num_nodes = 0;
  int root = -1;
  std::vector<int> node_face;               // face id, or -1 for exterior nodes
  std::vector<int> piece_left, piece_right;  // node ids, -1 if outside the region
};

// Frame of a standalone T-graph: one exterior node per interval (x_i, x_{i+1}),
// rooted at (x_n, x_1), so node ids match DimerGraph white ids.
DualFrame standalone_frame(const TGraph& g, const Arrangement& arr);

}  // namespace tiling

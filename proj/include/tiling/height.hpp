#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "tiling/hexgraph.hpp"
#include "tiling/tgraph.hpp"

namespace tiling {

// Heights on dual vertices in thirds: value(v) = numer(v) / 3. The crossing of
// edge (w,b) with w on the left adds 1_{wb matched} - 1/3.
struct HexHeight {
  hex::HexCoord base;
  std::unordered_map<uint64_t, int64_t> numer;
  bool has(const hex::HexCoord& v) const { return numer.count(hex_key(v)) > 0; }
  double value(const hex::HexCoord& v) const;
};

// Face nearest to the centroid of the region.
hex::HexCoord central_face(const HexSubgraph& g);

// Throws NotPerfect. Heights are anchored to 0 at `base` (default central_face).
HexHeight height_from_matching(const HexSubgraph& g, const HexMatching& m,
                               std::optional<hex::HexCoord> base = std::nullopt);

// Same with an explicit traversal order of the dual edges; used to check path
// independence. Returns the maximal discrepancy seen on closing edges, in thirds.
int64_t height_loop_defect(const HexSubgraph& g, const HexMatching& m);

// Angle flow on a T-graph's dimer graph: for each adjacent (segment, face),
// the two angles at the ends of segment-closure(face), measured away from the
// face, summed and divided by 2pi.
struct MrefFlow {
  std::vector<DimerGraph::Entry> entries;  // weight field holds the flow value
  double value(int black, int white) const;
};
MrefFlow reference_flow(const TGraph& g, const Arrangement& arr);

// Divergence of the flow at each black and each face white.
std::vector<double> flow_divergence_black(const MrefFlow& f, int num_blacks);
std::vector<double> flow_divergence_white(const MrefFlow& f, int num_whites);

// Total turning of a polyline (sum of signed exterior angles). ZeroStep on
// repeated points.
double winding(const std::vector<cplx>& path);

}  // namespace tiling

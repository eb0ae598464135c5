#pragma once

#include <cstdint>
#include <vector>

#include "tiling/tgraph.hpp"
#include "tiling/walk.hpp"

namespace tiling::ust {

// Wired spanning tree: next[v] is the vertex v points to, -1 on the boundary.
struct SpanningTree {
  std::vector<int> next;
  long steps = 0;                  // walk steps used by Wilson's algorithm
  bool all_walks_standard = true;  // meaningful only when piece_short is set
};

struct WilsonOptions {
  long max_steps = 2'000'000'000L;
  bool track_standard = false;
};

SpanningTree wilson_sample(const TGraph& g, const walk::JumpTable& jt, uint64_t seed, uint64_t index = 0,
                           const WilsonOptions& opt = {});
SpanningTree wilson_sample(const TGraph& g, uint64_t seed, uint64_t index = 0);

// Out-degree one on interior vertices, edges along walk moves, no cycle.
bool is_valid_tree(const TGraph& g, const SpanningTree& t, std::string* why = nullptr);

// Piece used by the outgoing edge of v (the piece adjacent to v in the
// direction of next[v]); -1 for boundary vertices and long degenerate jumps.
int tree_piece(const TGraph& g, const SpanningTree& t, int v);

// Result of the tree-to-dimer map: node_black[n] is the segment matched to
// frame node n (-1 for the root and for unmatched nodes).
struct TreeMatching {
  std::vector<int> node_black;
  std::vector<int> black_node;
};

// Pieces with piece_left == piece_right == -1 in the frame are ignored.
// Throws StructuralError if a segment touching the frame does not have
// exactly one uncovered piece, or if the uncovered pieces do not form a tree.
TreeMatching tree_to_matching(const TGraph& g, const SpanningTree& t, const DualFrame& frame);

// Segment carrying the move u -> v (one piece, or a whole segment for
// degenerate jumps) and the piece when the move is a single piece.
std::pair<int, int> move_of(const TGraph& g, int u, int v);
// Whether a short piece is adjacent to v along its host segment.
bool short_available(const TGraph& g, int v);

// Per-piece long/short test of a vertex path (moves between consecutive
// vertices). Throws MissingLabels without piece_short.
bool is_standard(const TGraph& g, const std::vector<int>& path);
inline bool is_standard(const TGraph& g, const walk::WalkPath& p) { return is_standard(g, p.vertices); }

// Number of segments with two or more long pieces covered by the tree.
int double_long_occupations(const TGraph& g, const SpanningTree& t);

}  // namespace tiling::ust

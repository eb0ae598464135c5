#pragma once

#include <array>
#include <random>
#include <unordered_map>
#include <vector>

#include "tiling/hexlattice.hpp"

namespace tiling {

inline uint64_t hex_key(int64_t m, int64_t n) {
  return (static_cast<uint64_t>(m + (1LL << 31)) << 32) | static_cast<uint32_t>(n + (1LL << 31));
}
inline uint64_t hex_key(const hex::HexCoord& c) { return hex_key(c.m, c.n); }

// Finite subgraph of the honeycomb induced by a set of whites and blacks.
// Neighbour slots are indexed by edge type a, b, c.
class HexSubgraph {
 public:
  std::vector<hex::HexCoord> whites, blacks;
  std::vector<std::array<int, 3>> white_nb;      // black index or -1
  std::vector<std::array<int, 3>> black_nb;      // white index or -1
  std::vector<std::array<double, 3>> weight;     // per white and slot, default 1

  static HexSubgraph from_coords(const std::vector<hex::HexCoord>& whites, const std::vector<hex::HexCoord>& blacks);

  int white_index(const hex::HexCoord& w) const;
  int black_index(const hex::HexCoord& b) const;
  int num_edges() const;
  bool balanced() const { return whites.size() == blacks.size(); }
  // Dual vertices touching at least one vertex of the subgraph.
  std::vector<hex::HexCoord> faces() const;
  // Dual vertices all six of whose surrounding vertices are present.
  std::vector<hex::HexCoord> interior_faces() const;

 private:
  std::unordered_map<uint64_t, int> wi_, bi_;
};

// Per white, the index of its matched black.
using HexMatching = std::vector<int>;

// Whites and blacks whose unit-lattice positions fall inside the polygon.
HexSubgraph polygon_region(const std::vector<cplx>& poly);

// Lozenge-tiling hexagon with side lengths a, b, c.
HexSubgraph hexagon_region(int a, int b, int c);

// Checks that every white is matched along an edge of g and blacks are used once.
bool is_perfect(const HexSubgraph& g, const HexMatching& m);

// One perfect matching found by randomized depth-first search, or empty.
HexMatching some_matching(const HexSubgraph& g, std::mt19937_64& rng);

// Union of triangles is connected, hole-free and without pinch points.
bool simply_connected(const HexSubgraph& g);

// Random tileable simply connected region: a hexagon with up to `removals`
// lozenges of one of its tilings peeled off the boundary.
HexSubgraph random_region(std::mt19937_64& rng, int a, int b, int c, int removals);

}  // namespace tiling

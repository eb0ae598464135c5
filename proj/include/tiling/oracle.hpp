#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <functional>

#include "tiling/hexgraph.hpp"

namespace tiling::oracle {

using BigInt = boost::multiprecision::cpp_int;

// |det| of the 0/1 biadjacency matrix, computed exactly (fraction-free
// Bareiss elimination). The all-ones signing is Kasteleyn for subgraphs of
// the honeycomb: every bounded face is a hexagon, 6 = 2*3 and (-1)^(3+1) = 1.
BigInt count_matchings(const HexSubgraph& g);

// Weighted partition function det K with K(w,b) = weight, via LU.
double weighted_partition(const HexSubgraph& g);

// Recursive enumeration. Calls visit on every perfect matching (if given) and
// returns the count; throws TooLarge past `limit`.
uint64_t enumerate_matchings(const HexSubgraph& g, const std::function<void(const HexMatching&)>& visit = {},
                             uint64_t limit = 10'000'000);

// K(w,b) K^{-1}(b,w), by LU. Singular if the region has no perfect matching.
double edge_probability(const HexSubgraph& g, int white, int black);

// All edge probabilities at once, indexed [white][slot].
std::vector<std::array<double, 3>> edge_probabilities(const HexSubgraph& g);

struct HeightMoments {
  std::vector<hex::HexCoord> faces;
  std::vector<double> mean;
  std::vector<std::vector<double>> cov;
  uint64_t matchings = 0;
};

// Exact moments of heights (relative to `base`) at the given faces under the
// uniform measure, by enumeration.
HeightMoments exact_height_moments(const HexSubgraph& g, const std::vector<hex::HexCoord>& faces,
                                   const hex::HexCoord& base, uint64_t limit = 1'000'000);

// Number of lozenge tilings of the a x b x c hexagon (product formula).
BigInt macmahon(int a, int b, int c);

}  // namespace tiling::oracle

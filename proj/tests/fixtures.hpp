#pragma once

#include <random>

#include "tiling/tgraph.hpp"

namespace fixtures {

using tiling::cplx;

// Pinwheel triangle: each side extended past one corner, the extension ends
// being the three boundary points. One bounded face, the triangle ABC.
inline tiling::TGraph pinwheel(cplx A = {0, 0}, cplx B = {1, 0}, cplx C = {0.3, 0.8}, double t = 0.5) {
  cplx A2 = A + t * (A - B), B2 = B + t * (B - C), C2 = C + t * (C - A);
  return tiling::TGraph::from_segments({{A2, B}, {B2, C}, {C2, A}}, {A2, B2, C2});
}

// Random T-graph: a pinwheel cut by random chords through random interior
// points, each chord stopped at the first segment hit on both sides.
inline tiling::TGraph random_tgraph(uint64_t seed, int chords) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0, 1);
  cplx A{0, 0}, B{1, 0}, C{0.4, 0.9};
  const double t = 0.4;
  std::vector<std::pair<cplx, cplx>> segs{{A + t * (A - B), B}, {B + t * (B - C), C}, {C + t * (C - A), A}};
  std::vector<cplx> bnd{segs[0].first, segs[1].first, segs[2].first};
  auto hit = [&](cplx p, cplx d) {
    double best = 1e300;
    for (auto& [a, b] : segs) {
      const double den = tiling::cross(d, b - a);
      if (std::abs(den) < 1e-14) continue;
      const double s = tiling::cross(a - p, b - a) / den;
      const double u = tiling::cross(a - p, d) / den;
      if (s > 1e-9 && u > 1e-6 && u < 1 - 1e-6) best = std::min(best, s);
    }
    return p + best * d;
  };
  for (int k = 0; k < chords; ++k) {
    double r1 = U(rng), r2 = U(rng);
    if (r1 + r2 > 1) {
      r1 = 1 - r1;
      r2 = 1 - r2;
    }
    cplx p = A + r1 * (B - A) + r2 * (C - A);
    cplx d = std::polar(1.0, 3.14159265358979 * U(rng));
    segs.emplace_back(hit(p, -d), hit(p, d));
  }
  return tiling::TGraph::from_segments(segs, bnd);
}

}  // namespace fixtures

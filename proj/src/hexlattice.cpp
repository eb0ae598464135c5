#include "tiling/hexlattice.hpp"

#include <algorithm>
#include <cmath>

namespace tiling::hex {

cplx plane_position(const HexCoord& c, double mesh) {
  cplx base = kWhite0;
  if (c.role == Role::Black) base = kBlack0;
  if (c.role == Role::Dual) base = kDual0;
  return mesh * (base + static_cast<double>(c.m) * e1 + static_cast<double>(c.n) * e2);
}

double SlopeTriple::min() const { return std::min({pa, pb, pc}); }
bool SlopeTriple::liquid(double margin) const { return min() >= margin && margin > 0; }

SlopeTriple slope_from_gradient(double dx, double dy) {
  const double h = kSqrt3 / 2;
  SlopeTriple s{1.0 / 3 + dy, 1.0 / 3 - h * dx - dy / 2, 1.0 / 3 + h * dx - dy / 2};
  const double tol = 1e-14;
  for (double p : {s.pa, s.pb, s.pc})
    if (!(p >= -tol && p <= 1 + tol)) throw Error("OutOfRange", "gradient outside the Newton polygon");
  return s;
}

std::array<double, 2> gradient_from_slope(const SlopeTriple& s) {
  return {(s.pc - s.pb) / kSqrt3, s.pa - 1.0 / 3};
}

std::array<HexCoord, 3> black_neighbors(const HexCoord& w) {
  return {black(w.m, w.n), black(w.m - 1, w.n), black(w.m - 1, w.n - 1)};
}

std::array<HexCoord, 3> white_neighbors(const HexCoord& b) {
  return {white(b.m, b.n), white(b.m + 1, b.n), white(b.m + 1, b.n + 1)};
}

EdgeType edge_type(const HexCoord& w, const HexCoord& b) {
  const int64_t dm = w.m - b.m, dn = w.n - b.n;
  if (dm == 0 && dn == 0) return EdgeType::a;
  if (dm == 1 && dn == 0) return EdgeType::b;
  if (dm == 1 && dn == 1) return EdgeType::c;
  throw Error("NotAdjacent", "white and black are not adjacent");
}

int kasteleyn_entry(const HexCoord& w, const HexCoord& b) {
  if (w.role != Role::White || b.role != Role::Black) throw Error("Role", "expected (white, black)");
  const int64_t dm = w.m - b.m, dn = w.n - b.n;
  return ((dm == 0 && dn == 0) || (dm == 1 && dn == 0) || (dm == 1 && dn == 1)) ? 1 : 0;
}

std::array<HexCoord, 3> white_face(const HexCoord& w) {
  return {dual(w.m, w.n), dual(w.m, w.n + 1), dual(w.m - 1, w.n)};
}

std::array<HexCoord, 3> black_face(const HexCoord& b) {
  return {dual(b.m + 1, b.n + 1), dual(b.m, b.n + 1), dual(b.m, b.n)};
}

std::array<HexCoord, 6> dual_neighbors(const HexCoord& v) {
  return {dual(v.m + 1, v.n),     dual(v.m + 1, v.n + 1), dual(v.m, v.n + 1),
          dual(v.m - 1, v.n),     dual(v.m - 1, v.n - 1), dual(v.m, v.n - 1)};
}

Crossing dual_crossing(const HexCoord& v, int dm, int dn) {
  const int64_t m = v.m, n = v.n;
  if (dm == 0 && dn == 1) return {white(m, n), black(m, n), +1};
  if (dm == 1 && dn == 0) return {white(m + 1, n), black(m, n - 1), +1};
  if (dm == 1 && dn == 1) return {white(m + 1, n), black(m, n), -1};
  if (dm == 0 && dn == -1) return {white(m, n - 1), black(m, n - 1), -1};
  if (dm == -1 && dn == 0) return {white(m, n), black(m - 1, n - 1), -1};
  if (dm == -1 && dn == -1) return {white(m, n - 1), black(m - 1, n - 1), +1};
  throw Error("NotAdjacent", "not a dual lattice step");
}

FaceRing face_ring(const HexCoord& v) {
  const int64_t m = v.m, n = v.n;
  return {{black(m, n), black(m - 1, n - 1), black(m, n - 1)},
          {white(m, n), white(m, n - 1), white(m + 1, n)}};
}

}  // namespace tiling::hex

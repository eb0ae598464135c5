#pragma once

#include <array>
#include <cstdint>

#include "tiling/common.hpp"

namespace tiling::hex {

enum class Role { White, Black, Dual };
enum class EdgeType { a, b, c };

struct HexCoord {
  int64_t m = 0;
  int64_t n = 0;
  Role role = Role::White;
  bool operator==(const HexCoord&) const = default;
};

inline HexCoord white(int64_t m, int64_t n) { return {m, n, Role::White}; }
inline HexCoord black(int64_t m, int64_t n) { return {m, n, Role::Black}; }
inline HexCoord dual(int64_t m, int64_t n) { return {m, n, Role::Dual}; }

// Unit lattice: hexagons of side sqrt(3)/3, white(0,0) at the origin,
// black(0,0) one horizontal edge to its right, dual(0,0) the face whose top
// edge is white(0,0)-black(0,0).
const cplx e1 = std::polar(1.0, -kPi / 6);
const cplx e2{0.0, 1.0};
const cplx kWhite0{0.0, 0.0};
const cplx kBlack0{kSqrt3 / 3, 0.0};
const cplx kDual0{kSqrt3 / 6, -0.5};

cplx plane_position(const HexCoord& c, double mesh = 1.0);

struct SlopeTriple {
  double pa = 1.0 / 3, pb = 1.0 / 3, pc = 1.0 / 3;
  bool liquid(double margin) const;
  double min() const;
};

// p_a = 1/3 + dy, p_b = 1/3 - (sqrt3/2) dx - dy/2, p_c = 1/3 + (sqrt3/2) dx - dy/2.
SlopeTriple slope_from_gradient(double dx, double dy);
std::array<double, 2> gradient_from_slope(const SlopeTriple& s);

EdgeType edge_type(const HexCoord& w, const HexCoord& b);
int kasteleyn_entry(const HexCoord& w, const HexCoord& b);

// Black neighbours of a white, ordered a, b, c; and white neighbours of a black.
std::array<HexCoord, 3> black_neighbors(const HexCoord& w);
std::array<HexCoord, 3> white_neighbors(const HexCoord& b);

// The three dual vertices around a white / black vertex, counterclockwise.
std::array<HexCoord, 3> white_face(const HexCoord& w);
std::array<HexCoord, 3> black_face(const HexCoord& b);

// Six neighbours of a dual vertex, counterclockwise starting with +e1.
std::array<HexCoord, 6> dual_neighbors(const HexCoord& v);

// For the dual edge v -> v + step (step one of the six unit moves), the primal
// edge it crosses and the sign s such that the dual increment is s * Omega(bw):
// s = +1 when the white endpoint lies on the left of the dual edge.
struct Crossing {
  HexCoord w, b;
  int sign;
};
Crossing dual_crossing(const HexCoord& v, int dm, int dn);

// The six (w,b) pairs around a dual face, in counterclockwise order
// b1,w1,b2,w2,b3,w3 with w_i the white after b_i.
struct FaceRing {
  std::array<HexCoord, 3> blacks;
  std::array<HexCoord, 3> whites;
};
FaceRing face_ring(const HexCoord& v);

}  // namespace tiling::hex

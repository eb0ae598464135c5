#pragma once

#include <vector>

#include "tiling/common.hpp"

namespace tiling::dbar {

// Uniform grid of complex samples; node (i,j) sits at origin + h*(i + i*j).
struct ComplexGrid {
  cplx origin{0, 0};
  double h = 1;
  int nx = 0, ny = 0;
  std::vector<cplx> v;

  ComplexGrid() = default;
  ComplexGrid(cplx origin, double h, int nx, int ny) : origin(origin), h(h), nx(nx), ny(ny), v(size_t(nx) * ny) {}
  // Square grid of n x n nodes covering [-half, half]^2 around c.
  static ComplexGrid square(cplx c, double half, int n);

  cplx point(int i, int j) const { return origin + h * cplx(i, j); }
  cplx& at(int i, int j) { return v[size_t(j) * nx + i]; }
  const cplx& at(int i, int j) const { return v[size_t(j) * nx + i]; }
  // Catmull-Rom bicubic interpolation; OutOfRange outside the grid.
  cplx interpolate(cplx z) const;
};

// Centered finite differences, zero on the outer ring.
ComplexGrid d_zbar(const ComplexGrid& f);
ComplexGrid d_z(const ComplexGrid& f);

// Cauchy transform (1/pi) * integral rhs(w)/(z-w) dA(w) over the grid, by
// zero-padded FFT convolution. Samples with |z - support_center| > support_radius
// are ignored when support_radius > 0.
ComplexGrid cauchy_transform(const ComplexGrid& rhs, double support_radius = -1, cplx support_center = 0);

// Beurling transform S = d/dz of the Cauchy transform, by its Fourier symbol
// on a 2x periodized grid.
ComplexGrid beurling_transform(const ComplexGrid& w);

// Solution of df/dzbar = rhs normalized by f(c) = 0 and df/dz(c) = 0 at the
// grid node nearest to `normal_at`.
ComplexGrid solve_dbar(const ComplexGrid& rhs, double support_radius = -1, cplx support_center = 0,
                       cplx normal_at = 0);

struct BeltramiResult {
  ComplexGrid f;          // principal solution z + C[omega]
  int iterations = 0;
  double update = 0;      // sup norm of the last Neumann update
  double residual = 0;    // sup |f_zbar - mu f_z| away from jumps of mu
};

// Principal solution of f_zbar = mu f_z, mu given on the grid and zero outside.
// Throws NoConvergence when the Neumann series has not settled after max_iter.
BeltramiResult solve_beltrami(const ComplexGrid& mu, double tol = 1e-10, int max_iter = 200);

}  // namespace tiling::dbar

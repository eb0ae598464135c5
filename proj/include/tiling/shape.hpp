#pragma once

#include <memory>
#include <vector>

#include "tiling/dbar.hpp"
#include "tiling/hexlattice.hpp"

namespace tiling::shape {

// Third vertex in the upper half plane of the triangle (Phi, 0, 1) with angles
// pi*pa, pi*pb, pi*pc at Phi, 0, 1. ExtremalSlope when a slope is 0 or 1.
cplx phi_from_slope(const hex::SlopeTriple& s);
hex::SlopeTriple slope_from_phi(cplx Phi);

// Lambda(x) = integral_0^x log(2 sin t) dt, for 0 <= x <= pi.
double log_sine_primitive(double x);
// Lambda(pi pa) + Lambda(pi pb) + Lambda(pi pc).
double surface_tension(const hex::SlopeTriple& s);

cplx beltrami_coefficient(cplx Phi);

// Characteristic data: the complex slope is constant along the lines
// zeta = s2 - Phi s1 (z = s1 e1 + s2 e2) with Phi = Phi0(zeta), where
// Phi0(zeta) = c0 + c1 zeta + c2 zeta^2. The domain U_ex is the preimage of
// the disk |zeta - zeta_center| < rho; the data must stay valid on the larger
// disk of radius extension * rho.
struct TestShapeParams {
  cplx c0 = std::polar(1.0, kPi / 3);
  cplx c1 = 0, c2 = 0;
  cplx zeta_center = 0;
  double rho = 1;
  double extension = 1.35;
};

// Pointwise evaluation of a characteristic test shape. The disk map is
// phi = e^{i theta} (zeta - zeta_center) / rho, with theta making dphi/dz
// real positive at the center.
class TestShape {
 public:
  // Throws CharacteristicCrossing if the characteristics cross on the
  // extended disk or leave the upper half plane.
  explicit TestShape(const TestShapeParams& p);

  const TestShapeParams& params() const { return p_; }
  cplx center() const { return zc_; }
  cplx rotation() const { return rot_; }

  cplx phi0(cplx zeta) const;
  cplx phi0_prime(cplx zeta) const;

  // Newton on zeta = s2 - Phi0(zeta) s1 from `guess` (default: the constant
  // slope guess, then continuation from the center). CharacteristicCrossing.
  cplx zeta(cplx z) const;
  cplx zeta(cplx z, cplx guess) const;
  cplx z_of_zeta(cplx zeta) const;

  cplx Phi(cplx z) const { return phi0(zeta(z)); }
  cplx phi(cplx z) const { return phi_of_zeta(zeta(z)); }
  cplx phi_of_zeta(cplx zeta) const { return rot_ * (zeta - p_.zeta_center) / p_.rho; }
  cplx phi_inverse(cplx u) const { return z_of_zeta(p_.zeta_center + u / rot_ * p_.rho); }
  // d phi / d y, and d phi/dz, d phi/dzbar.
  cplx dphi_dy(cplx z) const;
  cplx dphi_dz(cplx z) const;
  cplx dphi_dzbar(cplx z) const;

  // dH = A dx + B dy; H and the height h^C vanish at the center and are
  // integrated along straight segments by Gauss-Legendre panels.
  cplx dH_form(cplx Phi, cplx direction) const;
  cplx H(cplx z) const { return H_between(zc_, z); }
  cplx H_between(cplx a, cplx b) const;
  double height(cplx z) const { return height_between(zc_, z); }
  double height_between(cplx a, cplx b) const;

  // Second order defect coefficient J2 at z (the source term of the first
  // correction: d1 M1 + Phi d2 M1 = J2 / dphi_dy).
  cplx J2(cplx z) const;

  // Bounding box of phi^{-1}(disk of radius r).
  void bounding_box(double r, cplx& lo, cplx& hi) const;

 private:
  TestShapeParams p_;
  cplx zc_{0, 0};
  cplx rot_{1, 0};
};

struct Grid {
  cplx origin{0, 0};
  double h = 1;
  int nx = 0, ny = 0;
  cplx point(int i, int j) const { return origin + h * cplx(i, j); }
  size_t index(int i, int j) const { return size_t(j) * nx + i; }
  size_t size() const { return size_t(nx) * ny; }
};

struct LimitShape {
  Grid grid;
  std::vector<char> inside;  // |phi| < 1
  std::vector<double> hC;
  std::vector<hex::SlopeTriple> slope;
  std::vector<cplx> Phi, zeta, H, phi, mu;
  // M_n on the disk coordinate u = phi(z), n = 1..N_M; the same functions
  // serve as M^+ and M^- at first order.
  std::vector<dbar::ComplexGrid> M_plus, M_minus;
  double hC_path_residual = 0;  // max |h^C(row-first) - h^C(column-first)|
  double H_path_residual = 0;
  std::shared_ptr<const TestShape> analytic;
  int center_i = 0, center_j = 0;
};

// Grid of n x n nodes over the bounding box of U_ex. Phi by per-node Newton
// with continuation from the center, then slope, h^C, H, phi, mu. N_M in {0,1}
// sets the number of correction functions solved for.
LimitShape make_test_shape(const TestShapeParams& p, int n = 129, int NM = 1);

// (sqrt3/2) dPhi/dx + (Phi - 1/2) dPhi/dy by centered differences at nodes
// whose four neighbours are inside; zero elsewhere.
std::vector<cplx> burgers_residual(const LimitShape& s);

struct PathIntegral {
  std::vector<cplx> values;  // indexed like the grid, NaN outside
  double path_residual = 0;  // max difference between row-first and column-first paths
};

// Trapezoid integration of dH from the center along grid paths.
PathIntegral integrate_H(const LimitShape& s);

// Branch checks for dH: arg Phi in (0, pi), arg(1 - Phi) in (-pi, 0).
void check_branches(cplx Phi);

struct PhiMapReport {
  double mu_mismatch = 0;       // sup |mu(phi) - mu| over inner nodes, by finite differences
  double min_jacobian = 0;      // min |phi_z|^2 - |phi_zbar|^2 over inside nodes
  double min_abs_dphi_dy = 0;
  double beltrami_residual = 0; // residual of the principal solution
  double principal_mismatch = 0;  // sup |mu(f) - mu(phi)| over inner nodes
  int beltrami_iterations = 0;
};

// Checks the disk map on the grid: its Beltrami coefficient against mu, the
// Jacobian sign (NonInjective if not positive), d phi/dy away from 0, and the
// agreement with the principal solution of the Beltrami equation on n x n nodes.
PhiMapReport build_phi_map(const LimitShape& s, int n = 257);

// Solves d1 M1 + Phi d2 M1 = J2 / dphi_dy as a d-bar problem in the disk
// coordinate, on a grid of n x n nodes covering |u| <= 1.5 (source cut off
// smoothly between 1.15 and 1.3).
dbar::ComplexGrid solve_first_correction(const TestShape& t, int n = 193);

}  // namespace tiling::shape

#include "tiling/shape.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>

namespace tiling::shape {

using hex::SlopeTriple;

cplx phi_from_slope(const SlopeTriple& s) {
  const double tol = 1e-12;
  for (double p : {s.pa, s.pb, s.pc})
    if (!(p > tol && p < 1 - tol)) throw Error("ExtremalSlope", "slope on the boundary of the Newton polygon");
  if (std::abs(s.pa + s.pb + s.pc - 1) > 1e-9) throw Error("ExtremalSlope", "slopes must sum to 1");
  return std::sin(kPi * s.pc) / std::sin(kPi * s.pa) * std::polar(1.0, kPi * s.pb);
}

SlopeTriple slope_from_phi(cplx Phi) {
  if (!(Phi.imag() > 0)) throw Error("ExtremalSlope", "Phi must lie in the upper half plane");
  SlopeTriple s;
  s.pb = std::arg(Phi) / kPi;
  s.pc = 1 - std::arg(Phi - 1.0) / kPi;
  s.pa = 1 - s.pb - s.pc;
  return s;
}

namespace {
// 8-point Gauss-Legendre on [0,1].
constexpr std::array<double, 8> kGLx{0.019855071751231856, 0.10166676129318664, 0.2372337950418355,
                                     0.4082826787521751,   0.5917173212478249,  0.7627662049581645,
                                     0.8983332387068134,   0.9801449282487681};
constexpr std::array<double, 8> kGLw{0.05061426814518813, 0.11119051722668724, 0.15685332293894363,
                                     0.18134189168918100, 0.18134189168918100, 0.15685332293894363,
                                     0.11119051722668724, 0.05061426814518813};

// integral_0^x log(2 sin t) dt with the log singularity at 0 (and pi) removed
// analytically: log(2 sin t) = log t + log(2 sin t / t).
double lsp_regular(double x) {
  if (x <= 0) return 0;
  const int panels = std::max(1, static_cast<int>(std::ceil(x / 0.1)));
  const double hp = x / panels;
  double acc = 0;
  for (int k = 0; k < panels; ++k)
    for (int q = 0; q < 8; ++q) {
      const double t = (k + kGLx[q]) * hp;
      acc += kGLw[q] * hp * std::log(2 * std::sin(t) / t);
    }
  return acc + x * std::log(x) - x;
}
}  // namespace

double log_sine_primitive(double x) {
  if (x < 0 || x > kPi + 1e-12) throw Error("OutOfRange", "argument must lie in [0, pi]");
  x = std::min(x, kPi);
  // Lambda(pi - y) = Lambda(pi) - Lambda(y) by the symmetry t -> pi - t, and Lambda(pi) = 0.
  if (x > kPi / 2) return -lsp_regular(kPi - x);
  return lsp_regular(x);
}

double surface_tension(const SlopeTriple& s) {
  for (double p : {s.pa, s.pb, s.pc})
    if (p < -1e-12 || p > 1 + 1e-12) throw Error("OutOfRange", "slope outside [0,1]");
  auto c = [](double p) { return std::clamp(p, 0.0, 1.0); };
  return log_sine_primitive(kPi * c(s.pa)) + log_sine_primitive(kPi * c(s.pb)) + log_sine_primitive(kPi * c(s.pc));
}

cplx beltrami_coefficient(cplx Phi) {
  return (Phi - std::polar(1.0, kPi / 3)) / (Phi - std::polar(1.0, -kPi / 3));
}

void check_branches(cplx Phi) {
  if (!(Phi.imag() > 0) || !std::isfinite(Phi.real()))
    throw Error("BranchViolation", "arg Phi left (0, pi)");
}

namespace {
// Lattice coordinates z = s1 e1 + s2 e2.
inline double s1_of(cplx z) { return z.real() / (kSqrt3 / 2); }
inline double s2_of(cplx z) { return z.imag() + s1_of(z) / 2; }

// Truncated Taylor series in t, orders 0..3.
struct Jet {
  std::array<cplx, 4> c{};
  static Jet constant(cplx a) {
    Jet j;
    j.c[0] = a;
    return j;
  }
  static Jet line(cplx a, cplx b) {
    Jet j;
    j.c[0] = a;
    j.c[1] = b;
    return j;
  }
};
Jet operator+(Jet a, const Jet& b) {
  for (int k = 0; k < 4; ++k) a.c[k] += b.c[k];
  return a;
}
Jet operator-(Jet a, const Jet& b) {
  for (int k = 0; k < 4; ++k) a.c[k] -= b.c[k];
  return a;
}
Jet operator*(cplx s, Jet a) {
  for (auto& x : a.c) x *= s;
  return a;
}
Jet operator+(cplx s, Jet a) {
  a.c[0] += s;
  return a;
}
Jet operator*(const Jet& a, const Jet& b) {
  Jet r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; i + j < 4; ++j) r.c[i + j] += a.c[i] * b.c[j];
  return r;
}
Jet operator/(const Jet& a, const Jet& b) {
  Jet q;
  for (int k = 0; k < 4; ++k) {
    cplx acc = a.c[k];
    for (int i = 1; i <= k; ++i) acc -= b.c[i] * q.c[k - i];
    q.c[k] = acc / b.c[0];
  }
  return q;
}
Jet log(const Jet& a) {
  Jet l;
  l.c[0] = std::log(a.c[0]);
  for (int k = 1; k < 4; ++k) {
    cplx acc = double(k) * a.c[k];
    for (int i = 1; i < k; ++i) acc -= double(i) * l.c[i] * a.c[k - i];
    l.c[k] = acc / (double(k) * a.c[0]);
  }
  return l;
}
}  // namespace

TestShape::TestShape(const TestShapeParams& p) : p_(p) {
  if (!(p.rho > 0) || !(p.extension >= 1)) throw Error("OutOfRange", "rho > 0 and extension >= 1 required");
  // Valid characteristics on the extended disk: Phi0 in the upper half plane,
  // the map zeta -> z orientation preserving with Jacobian bounded below.
  const double R = p.extension * p.rho;
  const int nr = 24, na = 96;
  const double step = 1e-6 * p.rho;
  for (int a = 0; a <= nr; ++a)
    for (int b = 0; b < na; ++b) {
      const cplx zeta = p.zeta_center + std::polar(R * a / nr, 2 * kPi * b / na);
      if (!(phi0(zeta).imag() > 0)) throw Error("CharacteristicCrossing", "Phi0 leaves the upper half plane");
      const cplx dx = (z_of_zeta(zeta + step) - z_of_zeta(zeta - step)) / (2 * step);
      const cplx dy = (z_of_zeta(zeta + cplx(0, step)) - z_of_zeta(zeta - cplx(0, step))) / (2 * step);
      const double jac = cross(dx, dy);
      const double s1 = s1_of(z_of_zeta(zeta));
      if (!(jac > 0) || std::abs(1.0 + s1 * phi0_prime(zeta)) < 0.05)
        throw Error("CharacteristicCrossing", "characteristics cross on the extended domain");
    }
  zc_ = z_of_zeta(p.zeta_center);
  const cplx Phi = phi0(p.zeta_center);
  const double s1 = s1_of(zc_);
  const cplx Y = 1.0 / (1.0 + s1 * phi0_prime(p.zeta_center));
  const cplx zx = (1.0 - 2.0 * Phi) * Y / kSqrt3, zy = Y;
  const cplx zz = 0.5 * (zx - cplx(0, 1) * zy);
  rot_ = std::conj(zz) / std::abs(zz);
}

cplx TestShape::phi0(cplx zeta) const { return p_.c0 + zeta * (p_.c1 + zeta * p_.c2); }
cplx TestShape::phi0_prime(cplx zeta) const { return p_.c1 + 2.0 * p_.c2 * zeta; }

cplx TestShape::z_of_zeta(cplx zeta) const {
  const cplx Phi = phi0(zeta);
  if (!(Phi.imag() > 0)) throw Error("CharacteristicCrossing", "Phi0 leaves the upper half plane");
  const double s1 = -zeta.imag() / Phi.imag();
  const double s2 = zeta.real() + Phi.real() * s1;
  return s1 * hex::e1 + s2 * hex::e2;
}

cplx TestShape::zeta(cplx z, cplx guess) const {
  const double s1 = s1_of(z), s2 = s2_of(z);
  cplx x = guess;
  for (int it = 0; it < 60; ++it) {
    const cplx g = x - s2 + phi0(x) * s1;
    const cplx dg = 1.0 + phi0_prime(x) * s1;
    const cplx dx = g / dg;
    x -= dx;
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) break;
    if (std::abs(dx) <= 1e-15 * (1 + std::abs(x))) {
      const bool ok = std::abs(x - p_.zeta_center) <= p_.extension * p_.rho * (1 + 1e-9) &&
                      std::abs(1.0 + phi0_prime(x) * s1) >= 0.05 && phi0(x).imag() > 0;
      if (ok) return x;
      break;
    }
  }
  throw Error("CharacteristicCrossing", "no characteristic through the point");
}

cplx TestShape::zeta(cplx z) const {
  const double s1 = s1_of(z), s2 = s2_of(z);
  try {
    return zeta(z, s2 - p_.c0 * s1);
  } catch (const Error&) {
  }
  cplx guess = p_.zeta_center;
  const int steps = 32;
  for (int k = 1; k <= steps; ++k) guess = zeta(zc_ + (z - zc_) * (double(k) / steps), guess);
  return guess;
}

cplx TestShape::dphi_dy(cplx z) const {
  const cplx x = zeta(z);
  return rot_ / (p_.rho * (1.0 + s1_of(z) * phi0_prime(x)));
}

cplx TestShape::dphi_dz(cplx z) const {
  const cplx x = zeta(z);
  const cplx Y = 1.0 / (1.0 + s1_of(z) * phi0_prime(x));
  const cplx zx = (1.0 - 2.0 * phi0(x)) * Y / kSqrt3;
  return rot_ / p_.rho * 0.5 * (zx - cplx(0, 1) * Y);
}

cplx TestShape::dphi_dzbar(cplx z) const {
  const cplx x = zeta(z);
  const cplx Y = 1.0 / (1.0 + s1_of(z) * phi0_prime(x));
  const cplx zx = (1.0 - 2.0 * phi0(x)) * Y / kSqrt3;
  return rot_ / p_.rho * 0.5 * (zx + cplx(0, 1) * Y);
}

cplx TestShape::dH_form(cplx Phi, cplx d) const {
  check_branches(Phi);
  const cplx lp = std::log(Phi), lq = std::log(1.0 - Phi);
  const cplx A = (cplx(0, 2 * kPi) - lp - lq) * (kSqrt3 / 3);
  const cplx B = lq - lp;
  return A * d.real() + B * d.imag();
}

cplx TestShape::H_between(cplx a, cplx b) const {
  const double len = std::abs(b - a);
  if (len == 0) return 0;
  const int panels = std::max(1, static_cast<int>(std::ceil(len / 0.04)));
  cplx guess = zeta(a), acc = 0;
  for (int k = 0; k < panels; ++k)
    for (int q = 0; q < 8; ++q) {
      const cplx z = a + (b - a) * ((k + kGLx[q]) / panels);
      guess = zeta(z, guess);
      acc += kGLw[q] * dH_form(phi0(guess), (b - a) / double(panels));
    }
  return acc;
}

double TestShape::height_between(cplx a, cplx b) const {
  const double len = std::abs(b - a);
  if (len == 0) return 0;
  const int panels = std::max(1, static_cast<int>(std::ceil(len / 0.04)));
  cplx guess = zeta(a);
  double acc = 0;
  const cplx d = (b - a) / double(panels);
  for (int k = 0; k < panels; ++k)
    for (int q = 0; q < 8; ++q) {
      const cplx z = a + (b - a) * ((k + kGLx[q]) / panels);
      guess = zeta(z, guess);
      const auto g = hex::gradient_from_slope(slope_from_phi(phi0(guess)));
      acc += kGLw[q] * (g[0] * d.real() + g[1] * d.imag());
    }
  return acc;
}

cplx TestShape::J2(cplx z) const {
  const cplx x0 = zeta(z);
  const double s1 = s1_of(z), s2 = s2_of(z);
  cplx total = 0;
  // directions e1 (s1 += t) and e1 + e2 (s1 += t, s2 += t)
  for (int k = 1; k <= 2; ++k) {
    const cplx u = k == 1 ? hex::e1 : hex::e1 + hex::e2;
    const Jet S1 = Jet::line(s1, 1.0), S2 = Jet::line(s2, k == 2 ? 1.0 : 0.0);
    Jet Z = Jet::constant(x0);
    for (int it = 0; it < 4; ++it) {
      const Jet Phi = p_.c0 + (Z * (p_.c1 + p_.c2 * Z));
      const Jet dPhi = p_.c1 + 2.0 * p_.c2 * Z;
      const Jet g = Z - S2 + Phi * S1;
      const Jet dg = 1.0 + dPhi * S1;
      Z = Z - g / dg;
    }
    const Jet Phi = p_.c0 + (Z * (p_.c1 + p_.c2 * Z));
    const Jet dPhi = p_.c1 + 2.0 * p_.c2 * Z;
    const Jet P = (rot_ / p_.rho) * (Jet::constant(1.0) / (1.0 + dPhi * S1));
    check_branches(Phi.c[0]);
    const Jet lp = log(Phi), lq = log(1.0 + (-1.0) * Phi);
    const Jet A = (kSqrt3 / 3) * (cplx(0, 2 * kPi) + ((-1.0) * lp - lq));
    const Jet B = lq - lp;
    const Jet dH = u.real() * A + u.imag() * B;
    const cplx E = std::exp(-dH.c[0]);
    const cplx a2 = dH.c[1] / 2.0, a3 = 2.0 * dH.c[2] / 6.0;
    const cplx p = P.c[0], dp = P.c[1], ddp = 2.0 * P.c[2];
    total += E * (0.25 * ddp - dp * dp / (8.0 * p) - 0.5 * a2 * dp + p * (a2 * a2 / 2.0 - a3));
  }
  return total;
}

void TestShape::bounding_box(double r, cplx& lo, cplx& hi) const {
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (int b = 0; b < 720; ++b) {
    const cplx z = phi_inverse(std::polar(r, 2 * kPi * b / 720));
    x0 = std::min(x0, z.real());
    x1 = std::max(x1, z.real());
    y0 = std::min(y0, z.imag());
    y1 = std::max(y1, z.imag());
  }
  lo = {x0, y0};
  hi = {x1, y1};
}

namespace {
// Values along row-first and column-first paths from the center node, by the
// trapezoid rule on the per-node x and y components of a closed form.
template <class T>
double path_integrate(const Grid& g, int ci, int cj, const std::vector<char>& valid, const std::vector<T>& fx,
                      const std::vector<T>& fy, std::vector<T>& out) {
  const T nan = T(std::numeric_limits<double>::quiet_NaN());
  std::vector<T> a(g.size(), nan), b(g.size(), nan);
  auto ok = [&](int i, int j) { return valid[g.index(i, j)] != 0; };
  // row first
  a[g.index(ci, cj)] = T(0);
  for (int dir : {1, -1})
    for (int i = ci + dir; i >= 0 && i < g.nx && ok(i, cj); i += dir) {
      const size_t p = g.index(i - dir, cj), q = g.index(i, cj);
      a[q] = a[p] + double(dir) * g.h / 2 * (fx[p] + fx[q]);
    }
  for (int i = 0; i < g.nx; ++i) {
    if (std::isnan(std::real(a[g.index(i, cj)]))) continue;
    for (int dir : {1, -1})
      for (int j = cj + dir; j >= 0 && j < g.ny && ok(i, j); j += dir) {
        const size_t p = g.index(i, j - dir), q = g.index(i, j);
        a[q] = a[p] + double(dir) * g.h / 2 * (fy[p] + fy[q]);
      }
  }
  // column first
  b[g.index(ci, cj)] = T(0);
  for (int dir : {1, -1})
    for (int j = cj + dir; j >= 0 && j < g.ny && ok(ci, j); j += dir) {
      const size_t p = g.index(ci, j - dir), q = g.index(ci, j);
      b[q] = b[p] + double(dir) * g.h / 2 * (fy[p] + fy[q]);
    }
  for (int j = 0; j < g.ny; ++j) {
    if (std::isnan(std::real(b[g.index(ci, j)]))) continue;
    for (int dir : {1, -1})
      for (int i = ci + dir; i >= 0 && i < g.nx && ok(i, j); i += dir) {
        const size_t p = g.index(i - dir, j), q = g.index(i, j);
        b[q] = b[p] + double(dir) * g.h / 2 * (fx[p] + fx[q]);
      }
  }
  double res = 0;
  for (size_t k = 0; k < g.size(); ++k)
    if (!std::isnan(std::real(a[k])) && !std::isnan(std::real(b[k]))) res = std::max(res, std::abs(a[k] - b[k]));
  out = a;
  return res;
}

double smooth_cutoff(double r, double r0, double r1) {
  if (r <= r0) return 1;
  if (r >= r1) return 0;
  auto f = [](double t) { return t > 0 ? std::exp(-1 / t) : 0.0; };
  const double t = (r - r0) / (r1 - r0);
  return f(1 - t) / (f(1 - t) + f(t));
}
}  // namespace

PathIntegral integrate_H(const LimitShape& s) {
  const Grid& g = s.grid;
  std::vector<char> valid(g.size(), 0);
  std::vector<cplx> fx(g.size()), fy(g.size());
  for (size_t k = 0; k < g.size(); ++k) {
    const cplx Phi = s.Phi[k];
    if (!std::isfinite(Phi.real())) continue;
    check_branches(Phi);
    const cplx lp = std::log(Phi), lq = std::log(1.0 - Phi);
    fx[k] = (cplx(0, 2 * kPi) - lp - lq) * (kSqrt3 / 3);
    fy[k] = lq - lp;
    valid[k] = 1;
  }
  PathIntegral out;
  out.path_residual = path_integrate(g, s.center_i, s.center_j, valid, fx, fy, out.values);
  return out;
}

std::vector<cplx> burgers_residual(const LimitShape& s) {
  const Grid& g = s.grid;
  std::vector<cplx> r(g.size(), 0.0);
  for (int j = 1; j + 1 < g.ny; ++j)
    for (int i = 1; i + 1 < g.nx; ++i) {
      const size_t k = g.index(i, j);
      if (!s.inside[k] || !s.inside[g.index(i + 1, j)] || !s.inside[g.index(i - 1, j)] ||
          !s.inside[g.index(i, j + 1)] || !s.inside[g.index(i, j - 1)])
        continue;
      const cplx px = (s.Phi[g.index(i + 1, j)] - s.Phi[g.index(i - 1, j)]) / (2 * g.h);
      const cplx py = (s.Phi[g.index(i, j + 1)] - s.Phi[g.index(i, j - 1)]) / (2 * g.h);
      r[k] = kSqrt3 / 2 * px + (s.Phi[k] - 0.5) * py;
    }
  return r;
}

dbar::ComplexGrid solve_first_correction(const TestShape& t, int n) {
  if (t.params().extension < 1.3) throw Error("OutOfRange", "first correction needs extension >= 1.3");
  dbar::ComplexGrid rhs = dbar::ComplexGrid::square(0, 1.5, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const cplx u = rhs.point(i, j);
      const double w = smooth_cutoff(std::abs(u), 1.15, 1.3);
      if (w == 0) continue;
      const cplx z = t.phi_inverse(u);
      const cplx p = t.dphi_dy(z), Phi = t.Phi(z);
      rhs.at(i, j) = w * t.J2(z) / (cplx(0, 2 * Phi.imag()) * std::norm(p));
    }
  return dbar::solve_dbar(rhs);
}

LimitShape make_test_shape(const TestShapeParams& p, int n, int NM) {
  if (NM < 0 || NM > 1) throw Error("Unsupported", "correction order N_M must be 0 or 1");
  if (n < 9) throw Error("Grid", "grid too coarse");
  auto shape = std::make_shared<TestShape>(p);
  LimitShape s;
  s.analytic = shape;
  cplx lo, hi;
  shape->bounding_box(1.0, lo, hi);
  const double side = std::max(hi.real() - lo.real(), hi.imag() - lo.imag());
  const double h = side / (n - 5);
  const cplx mid = 0.5 * (lo + hi);
  s.grid.h = h;
  s.grid.nx = s.grid.ny = n;
  s.grid.origin = mid - h * cplx((n - 1) / 2.0, (n - 1) / 2.0);
  const Grid& g = s.grid;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  s.inside.assign(g.size(), 0);
  s.Phi.assign(g.size(), cplx(nan, nan));
  s.zeta = s.Phi;
  s.H = s.Phi;
  s.phi = s.Phi;
  s.mu = s.Phi;
  s.hC.assign(g.size(), nan);
  s.slope.assign(g.size(), SlopeTriple{});

  // continuation from the node nearest to the center, breadth first
  const cplx q = (shape->center() - g.origin) / h;
  s.center_i = static_cast<int>(std::lround(q.real()));
  s.center_j = static_cast<int>(std::lround(q.imag()));
  std::vector<char> seen(g.size(), 0);
  std::deque<std::pair<int, int>> queue{{s.center_i, s.center_j}};
  seen[g.index(s.center_i, s.center_j)] = 1;
  s.zeta[g.index(s.center_i, s.center_j)] = shape->zeta(g.point(s.center_i, s.center_j));
  std::vector<char> valid(g.size(), 0);
  while (!queue.empty()) {
    auto [i, j] = queue.front();
    queue.pop_front();
    const size_t k = g.index(i, j);
    const cplx zeta = s.zeta[k];
    valid[k] = 1;
    s.Phi[k] = shape->phi0(zeta);
    s.phi[k] = shape->phi_of_zeta(zeta);
    s.inside[k] = std::abs(s.phi[k]) < 1;
    s.mu[k] = beltrami_coefficient(s.Phi[k]);
    s.slope[k] = slope_from_phi(s.Phi[k]);
    const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
    for (int d = 0; d < 4; ++d) {
      const int a = i + di[d], b = j + dj[d];
      if (a < 0 || b < 0 || a >= g.nx || b >= g.ny || seen[g.index(a, b)]) continue;
      seen[g.index(a, b)] = 1;
      try {
        const cplx z2 = shape->zeta(g.point(a, b), zeta);
        if (std::abs(shape->phi_of_zeta(z2)) > 0.5 * (1 + p.extension)) continue;
        s.zeta[g.index(a, b)] = z2;
        queue.push_back({a, b});
      } catch (const Error&) {
        // beyond the extended domain; nodes inside U_ex are checked below
      }
    }
  }
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const size_t k = g.index(i, j);
      if (valid[k]) continue;
      bool inside = false;
      try {
        inside = std::abs(shape->phi(g.point(i, j))) < 1;
      } catch (const Error&) {
      }
      if (inside) throw Error("CharacteristicCrossing", "continuation did not reach a node of the domain");
    }

  std::vector<double> gx(g.size(), 0), gy(g.size(), 0);
  for (size_t k = 0; k < g.size(); ++k)
    if (valid[k]) {
      const auto gr = hex::gradient_from_slope(s.slope[k]);
      gx[k] = gr[0];
      gy[k] = gr[1];
    }
  s.hC_path_residual = path_integrate(g, s.center_i, s.center_j, valid, gx, gy, s.hC);
  auto H = integrate_H(s);
  s.H = H.values;
  s.H_path_residual = H.path_residual;
  if (NM >= 1) {
    s.M_plus.push_back(solve_first_correction(*shape));
    s.M_minus.push_back(s.M_plus.back());
  }
  return s;
}

PhiMapReport build_phi_map(const LimitShape& s, int n) {
  PhiMapReport r;
  const Grid& g = s.grid;
  const TestShape& t = *s.analytic;
  r.min_jacobian = 1e300;
  r.min_abs_dphi_dy = 1e300;
  for (int j = 1; j + 1 < g.ny; ++j)
    for (int i = 1; i + 1 < g.nx; ++i) {
      const size_t k = g.index(i, j);
      if (!s.inside[k]) continue;
      const cplx z = g.point(i, j);
      const cplx pz = t.dphi_dz(z), pzb = t.dphi_dzbar(z);
      r.min_jacobian = std::min(r.min_jacobian, std::norm(pz) - std::norm(pzb));
      r.min_abs_dphi_dy = std::min(r.min_abs_dphi_dy, std::abs(t.dphi_dy(z)));
      bool inner = true;
      for (int b = -1; b <= 1; ++b)
        for (int a = -1; a <= 1; ++a) inner &= s.inside[g.index(i + a, j + b)] != 0;
      if (!inner) continue;
      const cplx fx = (s.phi[g.index(i + 1, j)] - s.phi[g.index(i - 1, j)]) / (2 * g.h);
      const cplx fy = (s.phi[g.index(i, j + 1)] - s.phi[g.index(i, j - 1)]) / (2 * g.h);
      const cplx mu_fd = (fx + cplx(0, 1) * fy) / (fx - cplx(0, 1) * fy);
      r.mu_mismatch = std::max(r.mu_mismatch, std::abs(mu_fd - s.mu[k]));
    }
  if (!(r.min_jacobian > 0)) throw Error("NonInjective", "disk map folds");

  // principal solution of the Beltrami equation with mu extended by zero
  cplx lo, hi;
  t.bounding_box(1.0, lo, hi);
  const double half = 1.25 * std::max(hi.real() - lo.real(), hi.imag() - lo.imag());
  dbar::ComplexGrid mu = dbar::ComplexGrid::square(0.5 * (lo + hi), half, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const cplx z = mu.point(i, j);
      try {
        const cplx zeta = t.zeta(z);
        if (std::abs(t.phi_of_zeta(zeta)) < 1) mu.at(i, j) = beltrami_coefficient(t.phi0(zeta));
      } catch (const Error&) {
      }
    }
  auto bel = dbar::solve_beltrami(mu, 1e-10, 400);
  r.beltrami_residual = bel.residual;
  r.beltrami_iterations = bel.iterations;
  const auto fb = dbar::d_zbar(bel.f), fz = dbar::d_z(bel.f);
  for (int j = 4; j + 4 < n; ++j)
    for (int i = 4; i + 4 < n; ++i) {
      const cplx z = mu.point(i, j);
      double rad = 0;
      try {
        rad = std::abs(t.phi(z));
      } catch (const Error&) {
        continue;
      }
      if (rad > 0.9) continue;
      const cplx mf = fb.at(i, j) / fz.at(i, j);
      r.principal_mismatch = std::max(r.principal_mismatch, std::abs(mf - t.dphi_dzbar(z) / t.dphi_dz(z)));
    }
  return r;
}

}  // namespace tiling::shape

#include "tiling/dbar.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>

namespace tiling::dbar {

ComplexGrid ComplexGrid::square(cplx c, double half, int n) {
  if (n < 2) throw Error("Grid", "need at least two nodes per side");
  const double h = 2 * half / (n - 1);
  return ComplexGrid(c - cplx(half, half), h, n, n);
}

namespace {
double catmull(double p0, double p1, double p2, double p3, double t) {
  return p1 + 0.5 * t * (p2 - p0 + t * (2 * p0 - 5 * p1 + 4 * p2 - p3 + t * (3 * (p1 - p2) + p3 - p0)));
}
cplx catmull(cplx p0, cplx p1, cplx p2, cplx p3, double t) {
  return {catmull(p0.real(), p1.real(), p2.real(), p3.real(), t),
          catmull(p0.imag(), p1.imag(), p2.imag(), p3.imag(), t)};
}
}  // namespace

cplx ComplexGrid::interpolate(cplx z) const {
  const cplx q = (z - origin) / h;
  const double x = q.real(), y = q.imag();
  if (!(x >= 1 && y >= 1 && x <= nx - 2 && y <= ny - 2)) throw Error("OutOfRange", "interpolation outside the grid");
  const int i = std::min(static_cast<int>(x), nx - 3), j = std::min(static_cast<int>(y), ny - 3);
  const double tx = x - i, ty = y - j;
  cplx col[4];
  for (int b = 0; b < 4; ++b)
    col[b] = catmull(at(i - 1, j - 1 + b), at(i, j - 1 + b), at(i + 1, j - 1 + b), at(i + 2, j - 1 + b), tx);
  return catmull(col[0], col[1], col[2], col[3], ty);
}

ComplexGrid d_zbar(const ComplexGrid& f) {
  ComplexGrid out(f.origin, f.h, f.nx, f.ny);
  for (int j = 1; j + 1 < f.ny; ++j)
    for (int i = 1; i + 1 < f.nx; ++i) {
      const cplx fx = (f.at(i + 1, j) - f.at(i - 1, j)) / (2 * f.h);
      const cplx fy = (f.at(i, j + 1) - f.at(i, j - 1)) / (2 * f.h);
      out.at(i, j) = 0.5 * (fx + cplx(0, 1) * fy);
    }
  return out;
}

ComplexGrid d_z(const ComplexGrid& f) {
  ComplexGrid out(f.origin, f.h, f.nx, f.ny);
  for (int j = 1; j + 1 < f.ny; ++j)
    for (int i = 1; i + 1 < f.nx; ++i) {
      const cplx fx = (f.at(i + 1, j) - f.at(i - 1, j)) / (2 * f.h);
      const cplx fy = (f.at(i, j + 1) - f.at(i, j - 1)) / (2 * f.h);
      out.at(i, j) = 0.5 * (fx - cplx(0, 1) * fy);
    }
  return out;
}

namespace {
// In-place 2-D FFT of an (nx, ny) row-major complex array (x fastest).
class Fft2 {
 public:
  Fft2(int nx, int ny) : nx_(nx), ny_(ny) {
    buf_ = fftw_alloc_complex(size_t(nx) * ny);
    fwd_ = fftw_plan_dft_2d(ny, nx, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_2d(ny, nx, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Fft2() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(buf_);
  }
  Fft2(const Fft2&) = delete;
  Fft2& operator=(const Fft2&) = delete;

  void forward(std::vector<cplx>& a) { run(a, fwd_, 1.0); }
  void backward(std::vector<cplx>& a) { run(a, bwd_, 1.0 / (double(nx_) * ny_)); }

 private:
  void run(std::vector<cplx>& a, fftw_plan p, double scale) {
    std::memcpy(buf_, a.data(), sizeof(cplx) * a.size());
    fftw_execute(p);
    const cplx* b = reinterpret_cast<const cplx*>(buf_);
    for (size_t k = 0; k < a.size(); ++k) a[k] = b[k] * scale;
  }
  int nx_, ny_;
  fftw_complex* buf_;
  fftw_plan fwd_, bwd_;
};

std::vector<cplx> padded(const ComplexGrid& g, int px, int py) {
  std::vector<cplx> a(size_t(px) * py, 0.0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) a[size_t(j) * px + i] = g.at(i, j);
  return a;
}
}  // namespace

ComplexGrid cauchy_transform(const ComplexGrid& rhs, double support_radius, cplx support_center) {
  const int px = 2 * rhs.nx, py = 2 * rhs.ny;
  ComplexGrid src = rhs;
  if (support_radius > 0)
    for (int j = 0; j < rhs.ny; ++j)
      for (int i = 0; i < rhs.nx; ++i)
        if (std::abs(rhs.point(i, j) - support_center) > support_radius) src.at(i, j) = 0;
  std::vector<cplx> a = padded(src, px, py), k(size_t(px) * py, 0.0);
  for (int j = 0; j < py; ++j)
    for (int i = 0; i < px; ++i) {
      const int di = i < rhs.nx ? i : i - px, dj = j < rhs.ny ? j : j - py;
      if (di == 0 && dj == 0) continue;
      k[size_t(j) * px + i] = rhs.h / (kPi * cplx(di, dj));
    }
  Fft2 fft(px, py);
  fft.forward(a);
  fft.forward(k);
  for (size_t q = 0; q < a.size(); ++q) a[q] *= k[q];
  fft.backward(a);
  ComplexGrid out(rhs.origin, rhs.h, rhs.nx, rhs.ny);
  for (int j = 0; j < rhs.ny; ++j)
    for (int i = 0; i < rhs.nx; ++i) out.at(i, j) = a[size_t(j) * px + i];
  return out;
}

ComplexGrid beurling_transform(const ComplexGrid& w) {
  const int px = 2 * w.nx, py = 2 * w.ny;
  std::vector<cplx> a = padded(w, px, py);
  Fft2 fft(px, py);
  fft.forward(a);
  for (int j = 0; j < py; ++j)
    for (int i = 0; i < px; ++i) {
      const double kx = i < px / 2 ? i : i - px, ky = j < py / 2 ? j : j - py;
      const cplx k(kx / px, ky / py);
      a[size_t(j) * px + i] *= (kx == 0 && ky == 0) ? cplx(0) : std::conj(k) / k;
    }
  fft.backward(a);
  ComplexGrid out(w.origin, w.h, w.nx, w.ny);
  for (int j = 0; j < w.ny; ++j)
    for (int i = 0; i < w.nx; ++i) out.at(i, j) = a[size_t(j) * px + i];
  return out;
}

ComplexGrid solve_dbar(const ComplexGrid& rhs, double support_radius, cplx support_center, cplx normal_at) {
  for (auto& x : rhs.v)
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) throw Error("NoConvergence", "non-finite right-hand side");
  ComplexGrid f = cauchy_transform(rhs, support_radius, support_center);
  const cplx q = (normal_at - f.origin) / f.h;
  const int i0 = std::clamp(static_cast<int>(std::lround(q.real())), 1, f.nx - 2);
  const int j0 = std::clamp(static_cast<int>(std::lround(q.imag())), 1, f.ny - 2);
  const cplx fx = (f.at(i0 + 1, j0) - f.at(i0 - 1, j0)) / (2 * f.h);
  const cplx fy = (f.at(i0, j0 + 1) - f.at(i0, j0 - 1)) / (2 * f.h);
  const cplx fz = 0.5 * (fx - cplx(0, 1) * fy);
  const cplx f0 = f.at(i0, j0), z0 = f.point(i0, j0);
  for (int j = 0; j < f.ny; ++j)
    for (int i = 0; i < f.nx; ++i) f.at(i, j) -= f0 + fz * (f.point(i, j) - z0);
  return f;
}

BeltramiResult solve_beltrami(const ComplexGrid& mu, double tol, int max_iter) {
  double mmax = 0;
  for (auto& m : mu.v) mmax = std::max(mmax, std::abs(m));
  if (!(mmax < 1)) throw Error("NoConvergence", "|mu| must stay below 1");
  BeltramiResult r;
  ComplexGrid omega(mu.origin, mu.h, mu.nx, mu.ny);
  for (size_t k = 0; k < omega.v.size(); ++k) omega.v[k] = mu.v[k];
  for (r.iterations = 1; r.iterations <= max_iter; ++r.iterations) {
    ComplexGrid s = beurling_transform(omega);
    r.update = 0;
    for (size_t k = 0; k < omega.v.size(); ++k) {
      const cplx nw = mu.v[k] * (1.0 + s.v[k]);
      r.update = std::max(r.update, std::abs(nw - omega.v[k]));
      omega.v[k] = nw;
    }
    if (r.update < tol) break;
  }
  if (r.update >= tol) throw Error("NoConvergence", "Neumann series did not settle");
  r.f = cauchy_transform(omega);
  for (int j = 0; j < mu.ny; ++j)
    for (int i = 0; i < mu.nx; ++i) r.f.at(i, j) += mu.point(i, j);
  const ComplexGrid fb = d_zbar(r.f), fz = d_z(r.f);
  for (int j = 3; j + 3 < mu.ny; ++j)
    for (int i = 3; i + 3 < mu.nx; ++i) {
      bool smooth = true;
      for (int b = -3; b <= 3 && smooth; ++b)
        for (int a = -3; a <= 3 && smooth; ++a)
          smooth = std::abs(mu.at(i + a, j + b) - mu.at(i, j)) <= 10 * mu.h * (std::abs(a) + std::abs(b));
      if (smooth) r.residual = std::max(r.residual, std::abs(fb.at(i, j) - mu.at(i, j) * fz.at(i, j)));
    }
  return r;
}

}  // namespace tiling::dbar

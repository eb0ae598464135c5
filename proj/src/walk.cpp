#include "tiling/walk.hpp"

#include <algorithm>
#include <cmath>

namespace tiling::walk {

std::vector<Rate> transition_rates(const TGraph& g, int v) {
  if (g.boundary[v]) return {};
  const int s = g.host(v);
  if (s < 0) throw Error("DegenerateVertex", "vertex " + std::to_string(v) + " lies in no open segment");
  const int k = g.host_pos(v);
  const int xm = g.segments[s][k - 1], xp = g.segments[s][k + 1];
  const cplx x = g.points[v];
  const double dm = std::abs(g.points[xm] - x), dp = std::abs(g.points[xp] - x);
  const double L = std::abs(g.points[xp] - g.points[xm]);
  return {{xp, 1.0 / (dp * L)}, {xm, 1.0 / (dm * L)}};
}

std::vector<Rate> degenerate_rates(const TGraph& g, int v) {
  if (!g.degenerate(v)) throw Error("NotDegenerate", "vertex " + std::to_string(v) + " is not degenerate");
  for (const auto& dg : g.degenerate_geometry) {
    if (dg.vertex != v) continue;
    const double sum = dg.l[0] + dg.l[1] + dg.l[2];
    std::vector<Rate> out;
    for (int i = 0; i < 3; ++i) {
      const int s = dg.seg[i];
      if (s < 0) continue;
      const auto& sv = g.segments[s];
      int far = -1;
      if (sv.front() == v) far = sv.back();
      else if (sv.back() == v) far = sv.front();
      if (far < 0) throw Error("MissingGeometry", "segment does not end at the degenerate point");
      out.push_back({far, dg.l[i] / (g.segment_length(s) * sum)});
    }
    return out;
  }
  throw Error("MissingGeometry", "no reference triangle stored for vertex " + std::to_string(v));
}

std::vector<Rate> rates(const TGraph& g, int v) {
  if (g.boundary[v]) return {};
  if (g.degenerate(v)) return degenerate_rates(g, v);
  return transition_rates(g, v);
}

JumpTable::JumpTable(const TGraph& g) {
  const int n = g.num_vertices();
  off_.assign(n + 1, 0);
  total_.assign(n, 0);
  for (int v = 0; v < n; ++v) {
    std::vector<Rate> r;
    if (!g.boundary[v] && !(g.degenerate(v) && g.incidences(v).empty())) r = rates(g, v);
    off_[v + 1] = off_[v] + static_cast<int>(r.size());
    for (auto& x : r) {
      total_[v] += x.rate;
      r_.push_back(x);
    }
  }
}

int JumpTable::pick(int v, double u) const {
  double acc = u * total_[v];
  for (int k = off_[v]; k < off_[v + 1]; ++k) {
    acc -= r_[k].rate;
    if (acc < 0) return r_[k].target;
  }
  return r_[off_[v + 1] - 1].target;
}

std::mt19937_64 make_rng(uint64_t seed, uint64_t index) {
  std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32), static_cast<uint32_t>(index),
                    static_cast<uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

WalkPath sample_path(const TGraph& g, const JumpTable& jt, int start, const StopRule& rule, uint64_t seed,
                     uint64_t index) {
  auto rng = make_rng(seed, index);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  WalkPath p;
  int x = start;
  double t = 0;
  p.vertices.push_back(x);
  p.times.push_back(0);
  for (long k = 0;; ++k) {
    if (jt.degree(x) == 0) {
      p.reason = StopReason::BoundaryHit;
      p.end_time = t;
      return p;
    }
    if (std::abs(g.points[x] - rule.center) >= rule.radius) {
      p.reason = StopReason::ExitedRegion;
      p.end_time = t;
      return p;
    }
    if (k >= rule.max_jumps) {
      p.reason = StopReason::JumpCap;
      p.end_time = t;
      return p;
    }
    const double hold = -std::log1p(-U(rng)) / jt.total_rate(x);
    if (t + hold > rule.t_max) {
      p.reason = StopReason::TimeCap;
      p.end_time = rule.t_max;
      return p;
    }
    t += hold;
    x = jt.pick(x, U(rng));
    p.vertices.push_back(x);
    p.times.push_back(t);
  }
}

WalkPath sample_path(const TGraph& g, int start, const StopRule& rule, uint64_t seed, uint64_t index) {
  JumpTable jt(g);
  return sample_path(g, jt, start, rule, seed, index);
}

cplx position_at(const TGraph& g, const WalkPath& p, double t) {
  auto it = std::upper_bound(p.times.begin(), p.times.end(), t);
  const size_t i = it == p.times.begin() ? 0 : static_cast<size_t>(it - p.times.begin() - 1);
  return g.points[p.vertices[i]];
}

void CovAccumulator::add(cplx z) {
  CovAccumulator o;
  o.n = 1;
  o.mean = {z.real(), z.imag()};
  merge(o);
}

void CovAccumulator::merge(const CovAccumulator& o) {
  if (o.n == 0) return;
  const double nn = n + o.n;
  const Eigen::Vector2d d = o.mean - mean;
  m2 += o.m2 + d * d.transpose() * (n * o.n / nn);
  mean += d * (o.n / nn);
  n = nn;
}

Eigen::Matrix2d CovAccumulator::covariance() const {
  if (n < 2) throw Error("TooFewSamples", "covariance needs at least two points");
  return m2 / (n - 1);
}

Eigen::Matrix2d empirical_covariance(const std::vector<cplx>& points) {
  CovAccumulator acc;
  for (auto z : points) acc.add(z);
  return acc.covariance();
}

Eigen::Matrix2d empirical_covariance(const TGraph& g, const std::vector<WalkPath>& paths, double t) {
  std::vector<cplx> pts;
  for (const auto& p : paths)
    if (p.end_time >= t || p.reason == StopReason::TimeCap) pts.push_back(position_at(g, p, t));
  return empirical_covariance(pts);
}

double directional_variance(const Eigen::Matrix2d& cov, cplx d) {
  const Eigen::Vector2d u(d.real() / std::abs(d), d.imag() / std::abs(d));
  return u.dot(cov * u);
}

}  // namespace tiling::walk

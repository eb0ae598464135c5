#pragma once

#include <Eigen/Dense>
#include <limits>
#include <random>
#include <vector>

#include "tiling/tgraph.hpp"

namespace tiling::walk {

struct Rate {
  int target;
  double rate;
};

// Two-rate rule at a vertex lying inside a unique segment. Empty for
// boundary vertices; throws DegenerateVertex otherwise.
std::vector<Rate> transition_rates(const TGraph& g, int v);

// Collapsed-face rule: jump to the far end of segment i with rate
// l_i / (L_i (l_1 + l_2 + l_3)). Throws MissingGeometry / NotDegenerate.
std::vector<Rate> degenerate_rates(const TGraph& g, int v);

// Dispatches on the vertex kind.
std::vector<Rate> rates(const TGraph& g, int v);

// Per-vertex jump tables for fast sampling.
class JumpTable {
 public:
  explicit JumpTable(const TGraph& g);
  int degree(int v) const { return off_[v + 1] - off_[v]; }
  double total_rate(int v) const { return total_[v]; }
  // Target for a uniform u in [0,1).
  int pick(int v, double u) const;
  const Rate& rate(int v, int k) const { return r_[off_[v] + k]; }

 private:
  std::vector<int> off_;
  std::vector<Rate> r_;
  std::vector<double> total_;
};

// Generator for path `index` of run `seed`.
std::mt19937_64 make_rng(uint64_t seed, uint64_t index);

enum class StopReason { BoundaryHit, TimeCap, ExitedRegion, JumpCap };

struct StopRule {
  double t_max = std::numeric_limits<double>::infinity();
  cplx center{0, 0};
  double radius = std::numeric_limits<double>::infinity();  // exit when |X - center| >= radius
  long max_jumps = 100'000'000;
};

struct WalkPath {
  std::vector<int> vertices;
  std::vector<double> times;  // arrival times, times[0] = 0
  double end_time = 0;         // t_max on TimeCap, else last arrival
  StopReason reason = StopReason::BoundaryHit;
};

WalkPath sample_path(const TGraph& g, const JumpTable& jt, int start, const StopRule& rule, uint64_t seed,
                     uint64_t index = 0);
WalkPath sample_path(const TGraph& g, int start, const StopRule& rule, uint64_t seed, uint64_t index = 0);

// Position at time t (the walk is piecewise constant).
cplx position_at(const TGraph& g, const WalkPath& p, double t);

// Mergeable first/second moment accumulator for planar points.
struct CovAccumulator {
  double n = 0;
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d m2 = Eigen::Matrix2d::Zero();
  void add(cplx z);
  void merge(const CovAccumulator& o);
  Eigen::Matrix2d covariance() const;  // unbiased; throws if n < 2
};

// Sample covariance of positions at time t over paths alive at t.
Eigen::Matrix2d empirical_covariance(const TGraph& g, const std::vector<WalkPath>& paths, double t);
Eigen::Matrix2d empirical_covariance(const std::vector<cplx>& points);

// Variance of the projection on direction d (unit complex).
double directional_variance(const Eigen::Matrix2d& cov, cplx d);

}  // namespace tiling::walk

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "tiling/cut.hpp"
#include "tiling/height.hpp"
#include "tiling/tgraph.hpp"
#include "tiling/walk.hpp"

namespace tiling::stats {

struct Interval {
  double estimate = 0, lo = 0, hi = 0;
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool within(double a, double b) const { return a <= lo && hi <= b; }
  bool overlaps(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
};

// Streaming central moments up to order 4 (pairwise update formulas).
struct Moments {
  double n = 0, mean = 0, m2 = 0, m3 = 0, m4 = 0;
  void add(double x);
  void merge(const Moments& o);
  double variance() const;           // unbiased; NaN if n < 2
  double central(int k) const;       // (1/n) sum (x - mean)^k, k in 2..4
};

// Per-site Moments of a fixed set of sites; central(k) averages over sites.
struct MomentSet {
  std::vector<Moments> sites;
  MomentSet() = default;
  explicit MomentSet(int n) : sites(n) {}
  void add(const std::vector<double>& x);
  void merge(const MomentSet& o);
  double central(int k) const;
};

// Streaming mean and covariance of fixed-length vectors.
struct CovMatrix {
  double n = 0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd m2;
  CovMatrix() = default;
  explicit CovMatrix(int dim) : mean(Eigen::VectorXd::Zero(dim)), m2(Eigen::MatrixXd::Zero(dim, dim)) {}
  void add(const Eigen::VectorXd& x);
  void merge(const CovMatrix& o);
  Eigen::MatrixXd covariance() const;  // unbiased
};

// Mean per coordinate of fixed-length vectors.
struct MeanVector {
  double n = 0;
  Eigen::VectorXd sum;
  MeanVector() = default;
  explicit MeanVector(int dim) : sum(Eigen::VectorXd::Zero(dim)) {}
  void add(const Eigen::VectorXd& x);
  void merge(const MeanVector& o);
  Eigen::VectorXd mean() const { return sum / n; }
};

// Empirical quantile with linear interpolation; the input is sorted in place.
double quantile(std::vector<double>& v, double q);

// Percentile bootstrap over batch accumulators: each replicate merges a
// resample (with replacement) of the batches. The estimate is the statistic
// of the full merge. Deterministic in seed.
template <class Acc, class Stat>
Interval bootstrap_ci(const std::vector<Acc>& batches, Stat stat, int reps, uint64_t seed, double level = 0.95) {
  if (batches.empty()) throw Error("Empty", "no batches");
  Acc all = batches[0];
  for (size_t k = 1; k < batches.size(); ++k) all.merge(batches[k]);
  Interval out;
  out.estimate = stat(all);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<size_t> pick(0, batches.size() - 1);
  std::vector<double> r;
  r.reserve(reps);
  for (int k = 0; k < reps; ++k) {
    Acc a = batches[pick(rng)];
    for (size_t j = 1; j < batches.size(); ++j) a.merge(batches[pick(rng)]);
    r.push_back(stat(a));
  }
  out.lo = quantile(r, (1 - level) / 2);
  out.hi = quantile(r, (1 + level) / 2);
  return out;
}

// Wilson score interval for a binomial proportion.
Interval proportion_ci(double successes, double trials, double z = 1.96);

struct StatsConfig {
  int samples = 10000;
  int batches = 50;
  int bootstrap = 400;
  int threads = 1;
  uint64_t seed = 1;
  std::vector<double> deltas{1.0 / 16, 1.0 / 32, 1.0 / 64};
  std::map<std::string, double> tolerances{
      {"isotropy", 0.1}, {"gff_correlation", 0.9}, {"power_alpha", 0.5}, {"confidence", 0.95}};
  double chi_fit = std::numeric_limits<double>::quiet_NaN();
  // Throws BadConfig when samples < 20 * batches or batches < 10.
  void validate() const;
};

// ---- walks

struct IsotropyReport {
  int directions = 0;
  std::vector<double> variances;  // per direction k pi / directions
  Interval ratio;                 // max / min directional variance of the exit displacement
  Interval diffusivity;           // E|X_tau - X_0|^2 / E[tau]
  double mean_exit_time = 0;
  int boundary_hits = 0;          // paths absorbed before leaving the disk
};

// Walks from `start` stopped on leaving the disk of the given radius around
// it. OutOfRange if a path is absorbed at the boundary.
IsotropyReport isotropy_test(const TGraph& g, int start, double radius, int samples, uint64_t seed,
                             int batches = 50, int directions = 16, int reps = 400);

// Interior vertex nearest to z.
int nearest_interior_vertex(const TGraph& g, cplx z);

// ---- heights on a cut domain

// Runs Wilson on cd.gamma for sample indices [0, samples), split into
// contiguous batches; fn(batch, index, tree, matching, heights) is called
// from the thread owning the batch. Results do not depend on `threads`.
// heights is null when the matching uses a U-tilde edge outside the honeycomb.
using HeightVisitor =
    std::function<void(int batch, int index, const ust::SpanningTree&, const HexMatching&, const HexHeight*)>;
void sample_heights(const cut::CutDomain& cd, int samples, int batches, uint64_t seed, int threads,
                    const hex::HexCoord& base, const HeightVisitor& fn);

// A face of U_hex next to one of its edges but not interior, closest to z.
hex::HexCoord boundary_face(const HexSubgraph& u, cplx z, double mesh);

struct FitLine {
  double intercept = 0, slope = 0;
  double chi2 = 0;  // weighted residual sum of squares
  int dof = 0;
  double p_value = 1;
};
// Weighted least squares of y on x with standard errors se.
FitLine weighted_fit(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& se);

struct MomentRow {
  double delta = 0;
  Interval variance;
  Interval moment;    // k-th centered absolute moment
  Interval kurtosis;  // m4 / m2^2
};

struct MomentScan {
  int k = 2;
  std::vector<MomentRow> rows;
  double C_k = 0;          // least-squares constant in m_k = C_k (1 + log^{2k}(1/delta))
  double C_k_r2 = 0;       // R^2 of that fit
  FitLine polylog;         // variance = a + b log(1/delta)
  Interval alpha;          // variance ~ delta^{-alpha}, log-log slope
  bool power_law_rejected = false;  // alpha.hi < alpha_min
};

// Batches of center-height moments, one vector per delta. With MomentSet the
// moments are averaged over a few faces around the center.
MomentScan height_moment_scan(const std::vector<double>& deltas, const std::vector<std::vector<MomentSet>>& batches,
                              int k, int reps, uint64_t seed, double alpha_min = 0.5, double level = 0.95);
MomentScan height_moment_scan(const std::vector<double>& deltas, const std::vector<std::vector<Moments>>& batches,
                              int k, int reps, uint64_t seed, double alpha_min = 0.5, double level = 0.95);

struct DeviationRow {
  double delta = 0;
  Interval sup_all;       // sup over faces of |delta E[h] - h^C| after the best constant
  Interval sup_boundary;  // same over boundary faces
  double envelope = 0;    // delta (1 + log(1/delta))
};
struct DeviationTable {
  std::vector<DeviationRow> rows;
  double C = 0;  // max of sup_all.estimate / envelope
  bool shrinking = false;
};

// Per-batch mean heights over `faces` (delta-scaled positions in `pos`)
// against h^C; boundary marks the boundary faces.
DeviationRow mean_height_deviation(double delta, const std::vector<MeanVector>& batches,
                                   const std::vector<cplx>& pos, const std::vector<char>& boundary,
                                   const std::function<double(cplx)>& hC, int reps, uint64_t seed);
DeviationTable deviation_table(std::vector<DeviationRow> rows);

// ---- GFF covariance

// Dirichlet Green's function of the unit disk, -(1/2pi) log |(u-v)/(1-u conj v)|.
double disk_green(cplx u, cplx v);

struct GffFit {
  int pairs = 0;
  Interval kappa;        // Cov(h_i, h_j) ~ kappa G_D(u_i, u_j) over i < j
  Interval correlation;  // Pearson correlation of off-diagonal covariances with G_D
  double chi_fit = 0;    // 1 / (2 pi sqrt(kappa))
  bool diagonal_dominant = false;
};

// Covariance batches of heights at points u (disk coordinates).
GffFit gff_covariance_fit(const std::vector<CovMatrix>& batches, const std::vector<cplx>& u, int reps,
                          uint64_t seed);

// ---- measure comparison

// Alternating products prod w(b_i,w_i)/w(b_i,w_{i-1}) of the slot weights
// of u around its interior faces with six positive weights. With depth 1 only
// faces whose six neighbours are interior faces are kept.
struct FaceRatio {
  std::vector<hex::HexCoord> faces;
  std::vector<double> log_products;
};
FaceRatio face_ratios(const HexSubgraph& u, int depth = 0);

// +1 or -1: log weight(m) - log weight(m') = sign * sum_f (h_m(f) - h_m'(f)) log p_f.
int face_height_sign();

// The cut changes the weights of faces next to the loop, so the comparison
// with the uniform measure uses the faces away from it (depth 1).
struct MeasureReport {
  int faces = 0;                              // depth-1 faces
  double max_face_dev = 0, rms_face_dev = 0;  // of |p_f - 1| over them
  int boundary_layer_faces = 0;               // the other interior faces
  double boundary_layer_max_dev = 0;
  Interval double_long;     // fraction of trees with a double long occupation
  Interval double_long_per_segment;
  Interval tv;              // (1/2) E|dmu/dnu - 1| under nu restricted to honeycomb matchings, mu uniform
  Interval tv_bound;        // extra-edge probability + (1 - it) tv
  Interval all_standard;    // fraction of trees whose walks were standard
  Interval extra_edges;     // fraction of matchings using an edge outside the honeycomb
  int samples = 0;
};
MeasureReport measure_comparison(const cut::CutDomain& cd, int samples, uint64_t seed, int batches = 50,
                                 int reps = 400, int threads = 1);

}  // namespace tiling::stats

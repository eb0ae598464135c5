#include "tiling/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <thread>
#include <unordered_map>
#include <unordered_set>

namespace tiling::stats {

void Moments::add(double x) {
  Moments one;
  one.n = 1;
  one.mean = x;
  merge(one);
}

void Moments::merge(const Moments& o) {
  if (o.n == 0) return;
  if (n == 0) {
    *this = o;
    return;
  }
  const double na = n, nb = o.n, N = na + nb;
  const double d = o.mean - mean, d2 = d * d, d3 = d2 * d, d4 = d2 * d2;
  const double M2 = m2 + o.m2 + d2 * na * nb / N;
  const double M3 = m3 + o.m3 + d3 * na * nb * (na - nb) / (N * N) + 3 * d * (na * o.m2 - nb * m2) / N;
  const double M4 = m4 + o.m4 + d4 * na * nb * (na * na - na * nb + nb * nb) / (N * N * N) +
                    6 * d2 * (na * na * o.m2 + nb * nb * m2) / (N * N) + 4 * d * (na * o.m3 - nb * m3) / N;
  mean += d * nb / N;
  m2 = M2;
  m3 = M3;
  m4 = M4;
  n = N;
}

void MomentSet::add(const std::vector<double>& x) {
  if (x.size() != sites.size()) throw Error("BadSize", "one value per site");
  for (size_t i = 0; i < x.size(); ++i) sites[i].add(x[i]);
}

void MomentSet::merge(const MomentSet& o) {
  if (sites.empty()) {
    sites = o.sites;
    return;
  }
  if (o.sites.size() != sites.size()) throw Error("BadSize", "site counts differ");
  for (size_t i = 0; i < sites.size(); ++i) sites[i].merge(o.sites[i]);
}

double MomentSet::central(int k) const {
  if (sites.empty()) throw Error("Empty", "no sites");
  double s = 0;
  for (const Moments& m : sites) s += m.central(k);
  return s / static_cast<double>(sites.size());
}

double Moments::variance() const { return n < 2 ? std::nan("") : m2 / (n - 1); }

double Moments::central(int k) const {
  switch (k) {
    case 2: return m2 / n;
    case 3: return m3 / n;
    case 4: return m4 / n;
    default: throw Error("BadOrder", "central moments of order 2..4 only");
  }
}

void CovMatrix::add(const Eigen::VectorXd& x) {
  n += 1;
  const Eigen::VectorXd d = x - mean;
  mean += d / n;
  m2 += d * (x - mean).transpose();
}

void CovMatrix::merge(const CovMatrix& o) {
  if (o.n == 0) return;
  if (n == 0) {
    *this = o;
    return;
  }
  const double N = n + o.n;
  const Eigen::VectorXd d = o.mean - mean;
  m2 += o.m2 + d * d.transpose() * (n * o.n / N);
  mean += d * (o.n / N);
  n = N;
}

Eigen::MatrixXd CovMatrix::covariance() const {
  if (n < 2) throw Error("TooFew", "covariance needs two samples");
  return m2 / (n - 1);
}

void MeanVector::add(const Eigen::VectorXd& x) {
  sum += x;
  n += 1;
}

void MeanVector::merge(const MeanVector& o) {
  if (o.n == 0) return;
  if (n == 0) {
    *this = o;
    return;
  }
  sum += o.sum;
  n += o.n;
}

double quantile(std::vector<double>& v, double q) {
  if (v.empty()) throw Error("Empty", "quantile of nothing");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const size_t i = static_cast<size_t>(std::floor(pos));
  if (i + 1 >= v.size()) return v.back();
  return v[i] + (pos - static_cast<double>(i)) * (v[i + 1] - v[i]);
}

Interval proportion_ci(double k, double n, double z) {
  if (n <= 0) throw Error("Empty", "no trials");
  const double p = k / n, z2 = z * z;
  const double c = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double h = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
  return {p, std::max(0.0, c - h), std::min(1.0, c + h)};
}

void StatsConfig::validate() const {
  if (batches < 10) throw Error("BadConfig", "at least 10 batches");
  if (samples < 20 * batches) throw Error("BadConfig", "fewer than 20 samples per batch");
  if (bootstrap < 100) throw Error("BadConfig", "at least 100 bootstrap replicates");
  if (threads < 1) throw Error("BadConfig", "threads >= 1");
  if (deltas.empty()) throw Error("BadConfig", "empty delta sweep");
  for (double d : deltas)
    if (!(d > 0 && d < 1)) throw Error("BadConfig", "delta outside (0, 1)");
}

// ---- walks

int nearest_interior_vertex(const TGraph& g, cplx z) {
  int best = -1;
  double bd = 1e300;
  for (int v = 0; v < g.num_vertices(); ++v)
    if (!g.boundary[v] && std::abs(g.points[v] - z) < bd) {
      bd = std::abs(g.points[v] - z);
      best = v;
    }
  if (best < 0) throw Error("Empty", "graph has no interior vertex");
  return best;
}

namespace {
struct ExitAcc {
  walk::CovAccumulator cov;
  Moments tau;
  void merge(const ExitAcc& o) {
    cov.merge(o.cov);
    tau.merge(o.tau);
  }
};

std::vector<double> dir_variances(const Eigen::Matrix2d& c, int k) {
  std::vector<double> v;
  for (int j = 0; j < k; ++j) v.push_back(walk::directional_variance(c, std::polar(1.0, kPi * j / k)));
  return v;
}

double ratio_of(const Eigen::Matrix2d& c, int k) {
  auto v = dir_variances(c, k);
  return *std::max_element(v.begin(), v.end()) / *std::min_element(v.begin(), v.end());
}
}  // namespace

IsotropyReport isotropy_test(const TGraph& g, int start, double radius, int samples, uint64_t seed, int batches,
                             int directions, int reps) {
  if (batches < 2 || samples < batches) throw Error("BadConfig", "need samples >= batches >= 2");
  const walk::JumpTable jt(g);
  walk::StopRule rule;
  rule.center = g.points[start];
  rule.radius = radius;
  std::vector<ExitAcc> acc(batches);
  IsotropyReport rep;
  rep.directions = directions;
  for (int i = 0; i < samples; ++i) {
    const walk::WalkPath p = walk::sample_path(g, jt, start, rule, seed, i);
    if (p.reason == walk::StopReason::BoundaryHit) {
      ++rep.boundary_hits;
      continue;
    }
    if (p.reason != walk::StopReason::ExitedRegion) throw Error("JumpCap", "walk stopped before exit");
    ExitAcc& a = acc[static_cast<int64_t>(i) * batches / samples];
    a.cov.add(g.points[p.vertices.back()] - rule.center);
    a.tau.add(p.end_time);
  }
  if (rep.boundary_hits) throw Error("OutOfRange", "walks reached the boundary before the exit radius");
  rep.ratio = bootstrap_ci(acc, [&](const ExitAcc& a) { return ratio_of(a.cov.covariance(), directions); }, reps,
                           seed ^ 0x9e3779b97f4a7c15ULL);
  // second moment about the start, not about the mean
  auto diff = [](const ExitAcc& a) {
    const Eigen::Matrix2d c = a.cov.covariance() * ((a.cov.n - 1) / a.cov.n);
    return (c.trace() + a.cov.mean.squaredNorm()) / a.tau.mean;
  };
  rep.diffusivity = bootstrap_ci(acc, diff, reps, seed ^ 0x7f4a7c159e3779b9ULL);
  ExitAcc all = acc[0];
  for (int b = 1; b < batches; ++b) all.merge(acc[b]);
  rep.variances = dir_variances(all.cov.covariance(), directions);
  rep.mean_exit_time = all.tau.mean;
  return rep;
}

// ---- heights

void sample_heights(const cut::CutDomain& cd, int samples, int batches, uint64_t seed, int threads,
                    const hex::HexCoord& base, const HeightVisitor& fn) {
  if (!cd.labeled) throw Error("MissingLabels", "cut domain has no lattice labels");
  if (batches < 1 || samples < batches) throw Error("BadConfig", "need samples >= batches >= 1");
  const walk::JumpTable jt(cd.gamma);
  ust::WilsonOptions opt;
  opt.track_standard = static_cast<int>(cd.gamma.piece_short.size()) == cd.gamma.num_pieces();
  auto run_batch = [&](int b) {
    const int lo = static_cast<int>(static_cast<int64_t>(b) * samples / batches);
    const int hi = static_cast<int>(static_cast<int64_t>(b + 1) * samples / batches);
    for (int i = lo; i < hi; ++i) {
      const ust::SpanningTree t = ust::wilson_sample(cd.gamma, jt, seed, i, opt);
      const HexMatching m = cut::hex_matching(cd, t);
      if (!is_perfect(cd.u_hex, m)) {
        fn(b, i, t, m, nullptr);
        continue;
      }
      const HexHeight h = height_from_matching(cd.u_hex, m, base);
      fn(b, i, t, m, &h);
    }
  };
  if (threads <= 1) {
    for (int b = 0; b < batches; ++b) run_batch(b);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> err(threads);
  for (int k = 0; k < threads; ++k)
    pool.emplace_back([&, k] {
      try {
        for (int b = k; b < batches; b += threads) run_batch(b);
      } catch (...) {
        err[k] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : err)
    if (e) std::rethrow_exception(e);
}

hex::HexCoord boundary_face(const HexSubgraph& u, cplx z, double mesh) {
  std::unordered_set<uint64_t> inner;
  for (auto& v : u.interior_faces()) inner.insert(hex_key(v));
  hex::HexCoord best{};
  double bd = 1e300;
  for (auto& v : u.faces()) {
    if (inner.count(hex_key(v))) continue;
    // heights live on faces next to an edge of u
    const hex::FaceRing r = hex::face_ring(v);
    bool edge = false;
    for (int i = 0; i < 3; ++i) {
      const bool b = u.black_index(r.blacks[i]) >= 0;
      edge = edge || (b && u.white_index(r.whites[i]) >= 0) || (b && u.white_index(r.whites[(i + 2) % 3]) >= 0);
    }
    if (!edge) continue;
    const double d = std::abs(hex::plane_position(v, mesh) - z);
    if (d < bd) {
      bd = d;
      best = v;
    }
  }
  if (bd == 1e300) throw Error("Empty", "region has no boundary face");
  return best;
}

FitLine weighted_fit(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& se) {
  const size_t n = x.size();
  if (n < 2 || y.size() != n || se.size() != n) throw Error("BadFit", "need two points with errors");
  double S = 0, Sx = 0, Sy = 0, Sxx = 0, Sxy = 0;
  for (size_t k = 0; k < n; ++k) {
    const double w = 1 / (se[k] * se[k]);
    S += w;
    Sx += w * x[k];
    Sy += w * y[k];
    Sxx += w * x[k] * x[k];
    Sxy += w * x[k] * y[k];
  }
  FitLine f;
  const double D = S * Sxx - Sx * Sx;
  f.slope = (S * Sxy - Sx * Sy) / D;
  f.intercept = (Sy - f.slope * Sx) / S;
  for (size_t k = 0; k < n; ++k) {
    const double r = (y[k] - f.intercept - f.slope * x[k]) / se[k];
    f.chi2 += r * r;
  }
  f.dof = static_cast<int>(n) - 2;
  f.p_value = f.dof > 0 ? boost::math::cdf(boost::math::complement(boost::math::chi_squared(f.dof), f.chi2)) : 1.0;
  return f;
}

namespace {
double slope_of(const std::vector<double>& x, const std::vector<double>& y) {
  return weighted_fit(x, y, std::vector<double>(x.size(), 1.0)).slope;
}

template <class Acc>
Acc merged(const std::vector<Acc>& b) {
  Acc m = b.at(0);
  for (size_t j = 1; j < b.size(); ++j) m.merge(b[j]);
  return m;
}

double std_error(std::vector<double> reps) {
  Moments m;
  for (double r : reps) m.add(r);
  return std::sqrt(m.variance());
}
}  // namespace

MomentScan height_moment_scan(const std::vector<double>& deltas, const std::vector<std::vector<Moments>>& batches,
                              int k, int reps, uint64_t seed, double alpha_min, double level) {
  std::vector<std::vector<MomentSet>> sets(batches.size());
  for (size_t i = 0; i < batches.size(); ++i)
    for (const Moments& m : batches[i]) {
      MomentSet one(1);
      one.sites[0] = m;
      sets[i].push_back(one);
    }
  return height_moment_scan(deltas, sets, k, reps, seed, alpha_min, level);
}

MomentScan height_moment_scan(const std::vector<double>& deltas, const std::vector<std::vector<MomentSet>>& batches,
                              int k, int reps, uint64_t seed, double alpha_min, double level) {
  if (k != 2 && k != 4) throw Error("BadOrder", "k must be 2 or 4");
  if (deltas.size() != batches.size() || deltas.size() < 2) throw Error("BadFit", "one batch list per delta");
  MomentScan out;
  out.k = k;
  const size_t nd = deltas.size();
  std::vector<double> L(nd), var(nd), var_se(nd);
  for (size_t i = 0; i < nd; ++i) {
    MomentRow row;
    row.delta = deltas[i];
    const uint64_t s = seed + 1000 * (i + 1);
    row.variance = bootstrap_ci(batches[i], [](const MomentSet& m) { return m.central(2); }, reps, s, level);
    row.moment = bootstrap_ci(batches[i], [k](const MomentSet& m) { return m.central(k); }, reps, s + 1, level);
    row.kurtosis = bootstrap_ci(
        batches[i], [](const MomentSet& m) { return m.central(4) / (m.central(2) * m.central(2)); }, reps, s + 2,
        level);
    out.rows.push_back(row);
    L[i] = std::log(1 / deltas[i]);
    var[i] = row.variance.estimate;
  }

  // joint bootstrap: batches resampled independently per delta
  std::mt19937_64 rng(seed);
  std::vector<double> alphas;
  std::vector<std::vector<double>> var_reps(nd);
  for (int r = 0; r < reps; ++r) {
    std::vector<double> lv(nd);
    for (size_t i = 0; i < nd; ++i) {
      std::uniform_int_distribution<size_t> pick(0, batches[i].size() - 1);
      MomentSet m = batches[i][pick(rng)];
      for (size_t j = 1; j < batches[i].size(); ++j) m.merge(batches[i][pick(rng)]);
      var_reps[i].push_back(m.central(2));
      lv[i] = std::log(m.central(2));
    }
    alphas.push_back(slope_of(L, lv));
  }
  for (size_t i = 0; i < nd; ++i) var_se[i] = std_error(var_reps[i]);
  std::vector<double> lvar(nd);
  for (size_t i = 0; i < nd; ++i) lvar[i] = std::log(var[i]);
  out.alpha.estimate = slope_of(L, lvar);
  out.alpha.lo = quantile(alphas, (1 - level) / 2);
  out.alpha.hi = quantile(alphas, (1 + level) / 2);
  out.power_law_rejected = out.alpha.hi < alpha_min;
  out.polylog = weighted_fit(L, var, var_se);

  // m_k = C_k (1 + log^{2k}(1/delta)) through the origin
  double sxy = 0, sxx = 0, sy = 0, syy = 0;
  std::vector<double> env(nd), mk(nd);
  for (size_t i = 0; i < nd; ++i) {
    env[i] = 1 + std::pow(L[i], 2 * k);
    mk[i] = merged(batches[i]).central(k);
    sxy += env[i] * mk[i];
    sxx += env[i] * env[i];
    sy += mk[i];
    syy += mk[i] * mk[i];
  }
  out.C_k = sxy / sxx;
  double ss_res = 0;
  const double mean = sy / static_cast<double>(nd), ss_tot = syy - static_cast<double>(nd) * mean * mean;
  for (size_t i = 0; i < nd; ++i) ss_res += std::pow(mk[i] - out.C_k * env[i], 2);
  out.C_k_r2 = ss_tot > 0 ? 1 - ss_res / ss_tot : 1;
  return out;
}

namespace {
// sup_f |x_f - c| with the best constant c, over the flagged entries
double centered_sup(const Eigen::VectorXd& d, const std::vector<char>* mask) {
  double lo = 1e300, hi = -1e300;
  for (int f = 0; f < d.size(); ++f) {
    if (mask && !(*mask)[f]) continue;
    lo = std::min(lo, d[f]);
    hi = std::max(hi, d[f]);
  }
  return hi >= lo ? (hi - lo) / 2 : 0;
}
}  // namespace

DeviationRow mean_height_deviation(double delta, const std::vector<MeanVector>& batches, const std::vector<cplx>& pos,
                                   const std::vector<char>& boundary, const std::function<double(cplx)>& hC, int reps,
                                   uint64_t seed) {
  const int nf = static_cast<int>(pos.size());
  if (batches.empty() || batches[0].sum.size() != nf || static_cast<int>(boundary.size()) != nf)
    throw Error("BadInput", "batch dimension differs from the face list");
  Eigen::VectorXd ref(nf);
  for (int f = 0; f < nf; ++f) ref[f] = hC(pos[f]);
  DeviationRow row;
  row.delta = delta;
  row.envelope = delta * (1 + std::log(1 / delta));
  auto dev = [&](const MeanVector& m) -> Eigen::VectorXd { return delta * m.mean() - ref; };
  row.sup_all = bootstrap_ci(batches, [&](const MeanVector& m) { return centered_sup(dev(m), nullptr); }, reps, seed);
  row.sup_boundary =
      bootstrap_ci(batches, [&](const MeanVector& m) { return centered_sup(dev(m), &boundary); }, reps, seed + 1);
  return row;
}

DeviationTable deviation_table(std::vector<DeviationRow> rows) {
  std::sort(rows.begin(), rows.end(), [](auto& a, auto& b) { return a.delta > b.delta; });
  DeviationTable t;
  t.rows = rows;
  t.shrinking = true;
  for (size_t i = 0; i < rows.size(); ++i) {
    t.C = std::max(t.C, rows[i].sup_all.estimate / rows[i].envelope);
    if (i > 0 && rows[i].sup_all.lo > rows[i - 1].sup_all.hi) t.shrinking = false;
  }
  if (rows.size() > 1 && !(rows.back().sup_all.estimate < rows.front().sup_all.estimate)) t.shrinking = false;
  return t;
}

// ---- GFF

double disk_green(cplx u, cplx v) { return -std::log(std::abs((u - v) / (1.0 - u * std::conj(v)))) / (2 * kPi); }

namespace {
struct PairFit {
  double kappa = 0, corr = 0;
};
PairFit fit_pairs(const Eigen::MatrixXd& C, const std::vector<double>& G) {
  const int n = static_cast<int>(C.rows());
  std::vector<double> c;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) c.push_back(C(i, j));
  double sgc = 0, sgg = 0, mg = 0, mc = 0;
  const double m = static_cast<double>(c.size());
  for (size_t k = 0; k < c.size(); ++k) {
    sgc += G[k] * c[k];
    sgg += G[k] * G[k];
    mg += G[k] / m;
    mc += c[k] / m;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (size_t k = 0; k < c.size(); ++k) {
    sxy += (G[k] - mg) * (c[k] - mc);
    sxx += (G[k] - mg) * (G[k] - mg);
    syy += (c[k] - mc) * (c[k] - mc);
  }
  return {sgc / sgg, sxy / std::sqrt(sxx * syy)};
}
}  // namespace

GffFit gff_covariance_fit(const std::vector<CovMatrix>& batches, const std::vector<cplx>& u, int reps, uint64_t seed) {
  const int n = static_cast<int>(u.size());
  if (n < 3) throw Error("BadInput", "need three points");
  if (batches.empty() || batches[0].mean.size() != n) throw Error("BadInput", "batch dimension differs from points");
  std::vector<double> G;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) G.push_back(disk_green(u[i], u[j]));
  GffFit out;
  out.pairs = static_cast<int>(G.size());
  out.kappa = bootstrap_ci(batches, [&](const CovMatrix& b) { return fit_pairs(b.covariance(), G).kappa; }, reps, seed);
  out.correlation =
      bootstrap_ci(batches, [&](const CovMatrix& b) { return fit_pairs(b.covariance(), G).corr; }, reps, seed + 1);
  out.chi_fit = 1 / (2 * kPi * std::sqrt(out.kappa.estimate));
  CovMatrix all = batches[0];
  for (size_t k = 1; k < batches.size(); ++k) all.merge(batches[k]);
  const Eigen::MatrixXd C = all.covariance();
  out.diagonal_dominant = true;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && std::abs(C(i, j)) >= std::min(C(i, i), C(j, j))) out.diagonal_dominant = false;
  return out;
}

// ---- measure comparison

FaceRatio face_ratios(const HexSubgraph& u, int depth) {
  FaceRatio out;
  const std::vector<hex::HexCoord> inner = u.interior_faces();
  std::unordered_set<uint64_t> in;
  for (auto& v : inner) in.insert(hex_key(v));
  for (auto& v : inner) {
    if (depth > 0) {
      bool deep = true;
      for (auto& x : hex::dual_neighbors(v)) deep = deep && in.count(hex_key(x));
      if (!deep) continue;
    }
    const hex::FaceRing r = hex::face_ring(v);
    double lp = 0;
    bool ok = true;
    for (int i = 0; i < 3 && ok; ++i) {
      const int b = u.black_index(r.blacks[i]);
      auto w_of = [&](const hex::HexCoord& w) {
        const int wi = u.white_index(w);
        for (int s = 0; s < 3; ++s)
          if (u.white_nb[wi][s] == b) return u.weight[wi][s];
        return 0.0;
      };
      const double num = w_of(r.whites[i]), den = w_of(r.whites[(i + 2) % 3]);
      ok = num > 0 && den > 0;
      if (ok) lp += std::log(num) - std::log(den);
    }
    if (!ok) continue;
    out.faces.push_back(v);
    out.log_products.push_back(lp);
  }
  return out;
}

int face_height_sign() {
  // rotate a single face: m uses (b_i, w_i), m' uses (b_i, w_{i-1}); compare
  // the height step into the face across one ring edge
  const hex::HexCoord v = hex::dual(0, 0);
  const hex::FaceRing r = hex::face_ring(v);
  const hex::HexCoord u = hex::dual_neighbors(v)[0];
  const hex::Crossing c = hex::dual_crossing(u, static_cast<int>(v.m - u.m), static_cast<int>(v.n - u.n));
  for (int i = 0; i < 3; ++i)
    if (r.blacks[i] == c.b) {
      // h(v) - h(u) = sign * (1_{matched} - 1/3)
      const int in_m = r.whites[i] == c.w ? 1 : 0, in_mp = r.whites[(i + 2) % 3] == c.w ? 1 : 0;
      return c.sign * (in_m - in_mp);
    }
  throw Error("Internal", "crossing edge is not on the face ring");
}

namespace {
struct TreeAcc {
  double trees = 0, with_double = 0, double_count = 0, standard = 0, extra = 0;
  std::vector<double> L;  // per-sample sign * sum_f h(f) log p_f
  void merge(const TreeAcc& o) {
    trees += o.trees;
    with_double += o.with_double;
    double_count += o.double_count;
    standard += o.standard;
    extra += o.extra;
    L.insert(L.end(), o.L.begin(), o.L.end());
  }
};

double tv_of(const std::vector<double>& L) {
  // mu / nu proportional to exp(-L)
  const double mn = *std::min_element(L.begin(), L.end());
  double Z = 0;
  for (double x : L) Z += std::exp(-(x - mn));
  Z /= static_cast<double>(L.size());
  double s = 0;
  for (double x : L) s += std::abs(std::exp(-(x - mn)) / Z - 1);
  return s / (2 * static_cast<double>(L.size()));
}
}  // namespace

MeasureReport measure_comparison(const cut::CutDomain& cd, int samples, uint64_t seed, int batches, int reps,
                                 int threads) {
  const HexSubgraph u = cut::weighted_u_hex(cd, true);
  const FaceRatio fr = face_ratios(u, 1), all_faces = face_ratios(u, 0);
  const int sign = face_height_sign();
  MeasureReport rep;
  rep.faces = static_cast<int>(fr.faces.size());
  rep.boundary_layer_faces = static_cast<int>(all_faces.faces.size() - fr.faces.size());
  {
    std::unordered_set<uint64_t> deep;
    for (auto& v : fr.faces) deep.insert(hex_key(v));
    for (size_t f = 0; f < all_faces.faces.size(); ++f)
      if (!deep.count(hex_key(all_faces.faces[f])))
        rep.boundary_layer_max_dev =
            std::max(rep.boundary_layer_max_dev, std::abs(std::exp(all_faces.log_products[f]) - 1));
  }
  rep.samples = samples;
  double ss = 0;
  for (double lp : fr.log_products) {
    const double d = std::abs(std::exp(lp) - 1);
    rep.max_face_dev = std::max(rep.max_face_dev, d);
    ss += d * d;
  }
  rep.rms_face_dev = fr.faces.empty() ? 0 : std::sqrt(ss / static_cast<double>(fr.faces.size()));
  int interior_segments = 0;
  for (int s = 0; s < cd.gamma.num_segments(); ++s) {
    bool in = true;
    for (int x : cd.gamma.segments[s]) in = in && !cd.gamma.boundary[x];
    interior_segments += in;
  }
  const bool classified = static_cast<int>(cd.gamma.piece_short.size()) == cd.gamma.num_pieces();
  const hex::HexCoord base = boundary_face(cd.u_hex, 0, 1);
  std::vector<TreeAcc> acc(batches);
  sample_heights(cd, samples, batches, seed, threads, base,
                 [&](int b, int, const ust::SpanningTree& t, const HexMatching&, const HexHeight* h) {
                   TreeAcc& a = acc[b];
                   a.trees += 1;
                   if (classified) {
                     const int k = ust::double_long_occupations(cd.gamma, t);
                     a.with_double += k > 0;
                     a.double_count += k;
                     a.standard += t.all_walks_standard;
                   }
                   if (!h) {
                     a.extra += 1;
                     return;
                   }
                   double L = 0;
                   for (size_t f = 0; f < fr.faces.size(); ++f) L += h->value(fr.faces[f]) * fr.log_products[f];
                   a.L.push_back(sign * L);
                 });
  TreeAcc all;
  for (auto& a : acc) all.merge(a);
  rep.double_long = proportion_ci(all.with_double, all.trees);
  rep.all_standard = proportion_ci(all.standard, all.trees);
  rep.extra_edges = proportion_ci(all.extra, all.trees);
  const double segs = std::max(1, interior_segments);
  rep.double_long_per_segment =
      bootstrap_ci(acc, [&](const TreeAcc& a) { return a.double_count / (a.trees * segs); }, reps, seed + 7);
  rep.tv = bootstrap_ci(acc, [](const TreeAcc& a) { return a.L.empty() ? 0.0 : tv_of(a.L); }, reps, seed + 11);
  rep.tv_bound = bootstrap_ci(
      acc,
      [](const TreeAcc& a) {
        const double pe = a.extra / a.trees;
        return pe + (1 - pe) * (a.L.empty() ? 0.0 : tv_of(a.L));
      },
      reps, seed + 11);
  return rep;
}

}  // namespace tiling::stats

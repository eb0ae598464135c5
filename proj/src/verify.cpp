#include "tiling/verify.hpp"

#include <chrono>
#include <cstdio>
#include <sstream>

#include "tiling/cut.hpp"
#include "tiling/oracle.hpp"
#include "tiling/pipeline.hpp"
#include "tiling/stats.hpp"

namespace tiling::verify {

namespace {

using Clock = std::chrono::steady_clock;
using io::json;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string g6(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}
std::string ci(const stats::Interval& i) { return g6(i.estimate) + "[" + g6(i.lo) + "," + g6(i.hi) + "]"; }
json ci_json(const stats::Interval& i) { return json::array({i.estimate, i.lo, i.hi}); }

void say(const VerifyOptions& opt, const std::string& s) {
  if (opt.log) opt.log(s);
}

// Collects sub-checks: the criterion passes when all of them do.
struct Checks {
  bool all = true;
  std::ostringstream detail;
  void add(const std::string& key, bool ok, const std::string& value) {
    all = all && ok;
    detail << ' ' << key << '=' << value << (ok ? "" : "(!)");
  }
  void info(const std::string& key, const std::string& value) { detail << ' ' << key << '=' << value; }
};

CriterionResult finish(int id, const char* name, Checks& c, json metrics, Clock::time_point t0) {
  CriterionResult r;
  r.id = id;
  r.name = name;
  r.pass = c.all;
  r.seconds = seconds_since(t0);
  r.detail = c.detail.str();
  if (!r.detail.empty() && r.detail.front() == ' ') r.detail.erase(0, 1);
  r.metrics = std::move(metrics);
  r.metrics["seconds"] = r.seconds;
  return r;
}

planar::PlanarParams triangle(cplx A, cplx B, cplx C, double lambda_arg) {
  planar::PlanarParams p;
  p.A = A;
  p.B = B;
  p.C = C;
  p.lambda = std::polar(1.0, lambda_arg);
  return p;
}

planar::PlanarParams scalene(double lambda_arg) { return triangle(0, {1.1, 0.1}, {0.35, 0.9}, lambda_arg); }

shape::TestShapeParams curved_params() {
  shape::TestShapeParams p;
  p.c1 = 0.15 * std::polar(1.0, 0.4);
  p.c2 = cplx(0, 0.05);
  return p;
}

const shape::LimitShape& curved_shape() {
  static const shape::LimitShape s = shape::make_test_shape(curved_params(), 129, 1);
  return s;
}

// log-log slope of y against x
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (size_t k = 0; k < x.size(); ++k) {
    lx.push_back(std::log(x[k]));
    ly.push_back(std::log(y[k]));
  }
  return stats::weighted_fit(lx, ly, std::vector<double>(x.size(), 1.0)).slope;
}

const std::vector<double> kSweep{1.0 / 16, 1.0 / 32, 1.0 / 64};

}  // namespace

// ---- 1

CriterionResult oracle_exactness(const VerifyOptions& opt) {
  const auto t0 = Clock::now();
  Checks c;
  int hexagons = 0, hex_ok = 0;
  for (int a = 1; a <= 3; ++a)
    for (int b = 1; b <= 3; ++b)
      for (int cc = 1; cc <= 3; ++cc) {
        const HexSubgraph g = hexagon_region(a, b, cc);
        const oracle::BigInt det = oracle::count_matchings(g);
        const uint64_t en = oracle::enumerate_matchings(g);
        ++hexagons;
        hex_ok += det == oracle::BigInt(en) && det == oracle::macmahon(a, b, cc);
      }
  c.add("hexagons", hex_ok == hexagons, std::to_string(hex_ok) + "/" + std::to_string(hexagons));

  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<int> side(1, 4), rem(0, 8);
  int regions = 0, reg_ok = 0, draws = 0;
  uint64_t largest = 0;
  while (regions < 30 && draws < 1000) {
    ++draws;
    const HexSubgraph g = random_region(rng, side(rng), side(rng), side(rng), rem(rng));
    if (!simply_connected(g)) continue;
    uint64_t en = 0;
    try {
      en = oracle::enumerate_matchings(g, {}, 10'000);
    } catch (const Error& e) {
      if (e.kind() == "TooLarge") continue;
      throw;
    }
    ++regions;
    largest = std::max(largest, en);
    reg_ok += oracle::count_matchings(g) == oracle::BigInt(en);
  }
  c.add("regions", regions == 30 && reg_ok == regions, std::to_string(reg_ok) + "/" + std::to_string(regions));
  c.info("largest", std::to_string(largest));
  const double secs = seconds_since(t0);
  c.add("seconds", secs < 60, g6(secs));
  return finish(1, "oracle-exactness", c,
                {{"hexagons", hexagons}, {"hexagons_ok", hex_ok}, {"regions", regions}, {"regions_ok", reg_ok}}, t0);
}

// ---- 2

CriterionResult ust_dimer_law(const VerifyOptions& opt) {
  const auto t0 = Clock::now();
  Checks c;
  const cut::FlatCut fc = cut::make_flat_cut(scalene(0.4), 8, 7);
  const auto& cd = fc.cut;
  if (!cd.labeled) throw Error("Unlabeled", "flat cut has no lattice labels");
  const HexSubgraph wu = cut::weighted_u_hex(cd);
  const auto exact = oracle::edge_probabilities(wu);
  const int N = 10000;
  std::vector<std::array<int, 3>> hits(wu.whites.size(), {0, 0, 0});
  walk::JumpTable jt(cd.gamma);
  for (int i = 0; i < N; ++i) {
    const HexMatching m = cut::hex_matching(cd, ust::wilson_sample(cd.gamma, jt, opt.seed + 2, i));
    for (size_t w = 0; w < m.size(); ++w)
      for (int s = 0; s < 3; ++s) hits[w][s] += wu.white_nb[w][s] == m[w];
  }
  int edges = 0, within = 0;
  double worst = 0;
  for (size_t w = 0; w < wu.whites.size(); ++w)
    for (int s = 0; s < 3; ++s) {
      if (wu.white_nb[w][s] < 0) continue;
      const double p = exact[w][s];
      const double sd = std::sqrt(std::max(p * (1 - p), 1e-12) / N);
      const double z = std::abs(hits[w][s] / double(N) - p) / sd;
      ++edges;
      within += z <= 4;
      worst = std::max(worst, z);
    }
  const double frac = double(within) / edges;
  c.info("faces", std::to_string(cd.u_hex.interior_faces().size()));
  c.info("edges", std::to_string(edges));
  c.add("within_4sigma", frac >= 0.95, g6(frac));
  c.info("max_z", g6(worst));
  const double secs = seconds_since(t0);
  c.add("seconds", secs < 600, g6(secs));
  return finish(2, "ust-dimer-law", c,
                {{"faces", cd.u_hex.interior_faces().size()}, {"edges", edges}, {"fraction_within", frac},
                 {"max_z", worst}, {"samples", N}},
                t0);
}

// ---- 3

CriterionResult walk_mechanics(const VerifyOptions& opt) {
  const auto t0 = Clock::now();
  Checks c;
  const planar::Patch patch = planar::build_whole_plane_patch(scalene(1.3), planar::Window::disk(0, 45), 1.0);
  const TGraph& g = patch.graph;
  // The rates act along the host segment: the identities are checked on the
  // coordinate along it. The stored points are collinear only up to rounding,
  // which is reported separately.
  double drift = 0, speed = 0, off_line = 0;
  int vertices = 0;
  for (int v = 0; v < g.num_vertices(); ++v) {
    if (g.boundary[v] || g.degenerate(v)) continue;
    const auto& seg = g.segments[g.host(v)];
    const cplx e = (g.points[seg.back()] - g.points[seg.front()]) / std::abs(g.points[seg.back()] - g.points[seg.front()]);
    double d = 0, s = 0;
    for (const auto& r : walk::transition_rates(g, v)) {
      const cplx step = g.points[r.target] - g.points[v];
      const double x = dot(step, e);
      d += r.rate * x;
      s += r.rate * x * x;
      off_line = std::max(off_line, std::abs(cross(e, step)) / std::abs(step));
    }
    drift = std::max(drift, std::abs(d));
    speed = std::max(speed, std::abs(s - 1));
    ++vertices;
  }
  c.info("vertices", std::to_string(vertices));
  c.add("martingale", drift <= 1e-12, g6(drift));
  c.add("unit_speed", speed <= 1e-12, g6(speed));
  c.info("max_sine_off_segment", g6(off_line));

  walk::JumpTable jt(g);
  const int start = stats::nearest_interior_vertex(g, 0);
  const int N = 10000, B = 50;
  const double t = 100;
  std::vector<walk::CovAccumulator> batches(B);
  walk::StopRule rule;
  rule.t_max = t;
  int early = 0;
  for (int i = 0; i < N; ++i) {
    const auto p = walk::sample_path(g, jt, start, rule, opt.seed + 3, i);
    if (p.reason != walk::StopReason::TimeCap) ++early;
    batches[i * B / N].add(walk::position_at(g, p, t) - g.points[start]);
  }
  const auto speed_ci = stats::bootstrap_ci(
      batches, [t](const walk::CovAccumulator& a) { return a.covariance().trace() / t; }, 400, opt.seed + 4);
  // the band is on the estimate; with 10^4 paths its standard error is about 1%
  c.add("trace_var_over_t", early == 0 && speed_ci.estimate >= 0.97 && speed_ci.estimate <= 1.03, ci(speed_ci));

  // exit from the disk of radius r around the start
  const double r = 4;
  walk::StopRule exit_rule;
  exit_rule.center = g.points[start];
  exit_rule.radius = r;
  std::array<int, 5> late{};
  int absorbed = 0;
  for (int i = 0; i < N; ++i) {
    const auto p = walk::sample_path(g, jt, start, exit_rule, opt.seed + 5, i);
    if (p.reason != walk::StopReason::ExitedRegion) ++absorbed;
    for (int n = 1; n <= 4; ++n) late[n] += p.end_time >= 18 * n * r * r;
  }
  bool tail_ok = absorbed == 0;
  std::string tail;
  json tails = json::array();
  for (int n = 1; n <= 4; ++n) {
    const auto pi = stats::proportion_ci(late[n], N);
    tail_ok = tail_ok && pi.lo <= std::pow(2.0, -n);
    tail += (n > 1 ? "," : "") + g6(pi.estimate);
    tails.push_back(ci_json(pi));
  }
  c.add("exit_tail", tail_ok, tail);
  return finish(3, "walk-mechanics", c,
                {{"vertices", vertices}, {"max_drift", drift}, {"max_speed_dev", speed}, {"max_sine_off_segment", off_line},
                 {"trace_var_over_t", ci_json(speed_ci)}, {"exit_tail", tails}},
                t0);
}

// ---- 4

CriterionResult clt_isotropy(const VerifyOptions& opt) {
  const auto t0 = Clock::now();
  Checks c;
  const std::vector<planar::PlanarParams> tri{
      triangle(0, 1, std::polar(1.0, kPi / 3), 0), triangle(0, {1.1, 0.1}, {0.35, 0.9}, 0),
      triangle(0, 1, {0.75, 0.4}, 0)};
  const double radius = 50, mesh = 1;
  const int N = 10000;
  json rows = json::array();
  double worst_ratio = 0;
  bool ratios_ok = true, diff_ok = true;
  for (size_t k = 0; k < tri.size(); ++k) {
    double lo = -1e300, hi = 1e300;
    for (int j = 0; j < 5; ++j) {
      planar::PlanarParams p = tri[k];
      p.lambda = std::polar(1.0, 0.13 + j * kPi / 5);
      const planar::Patch patch = planar::build_whole_plane_patch(p, planar::Window::disk(0, 58), mesh);
      const int start = stats::nearest_interior_vertex(patch.graph, 0);
      const auto rep = stats::isotropy_test(patch.graph, start, radius * mesh, N, opt.seed + 10 * k + j);
      say(opt, "  triangle " + std::to_string(k) + " lambda " + std::to_string(j) + " ratio " + ci(rep.ratio) +
                   " diffusivity " + ci(rep.diffusivity));
      ratios_ok = ratios_ok && rep.ratio.within(0.9, 1.1);
      worst_ratio = std::max(worst_ratio, rep.ratio.hi);
      lo = std::max(lo, rep.diffusivity.lo);
      hi = std::min(hi, rep.diffusivity.hi);
      rows.push_back({{"triangle", k}, {"lambda_arg", std::arg(p.lambda)}, {"ratio", ci_json(rep.ratio)},
                      {"diffusivity", ci_json(rep.diffusivity)}});
    }
    // the five intervals share a point
    diff_ok = diff_ok && lo <= hi;
    c.info("diffusivity_common_" + std::to_string(k), lo <= hi ? "[" + g6(lo) + "," + g6(hi) + "]" : "none");
  }
  c.add("isotropy_ratio_hi", ratios_ok, g6(worst_ratio));
  c.add("lambda_independent", diff_ok, diff_ok ? "yes" : "no");
  const double secs = seconds_since(t0);
  c.add("seconds", secs < 900, g6(secs));
  return finish(4, "clt-isotropy", c, {{"runs", rows}}, t0);
}

// ---- 5

CriterionResult construction_quality(const VerifyOptions& opt) {
  const auto t0 = Clock::now();
  Checks c;
  (void)opt;
  // Burgers residual against grid spacing
  std::vector<double> h, res;
  for (int n : {49, 97, 193}) {
    const shape::LimitShape s = shape::make_test_shape(curved_params(), n, 0);
    double m = 0;
    for (const cplx& x : shape::burgers_residual(s)) m = std::max(m, std::abs(x));
    h.push_back(s.grid.h);
    res.push_back(m);
  }
  const double burgers_order = loglog_slope(h, res);
  c.add("burgers_order", burgers_order >= 1.8, g6(burgers_order));
  c.info("burgers_C", g6(res.back() / (h.back() * h.back())));

  const shape::LimitShape& s = curved_shape();
  json defect = json::object();
  for (int NM : {0, 1}) {
    std::vector<double> d{1.0 / 8, 1.0 / 16, 1.0 / 32}, sup;
    for (double delta : d) sup.push_back(shape::black_defect(shape::build_FG_discrete(s, delta, NM), 0.8).sup);
    const double slope = loglog_slope(d, sup);
    c.add("defect_slope_NM" + std::to_string(NM), slope >= NM + 2 - 0.05, g6(slope));
    defect[std::to_string(NM)] = slope;
  }

  const double delta = 1.0 / 32;
  const shape::Pipeline p = shape::run_pipeline(s, delta);
  const double diam = p.correction.graph.diameter();
  const double loop = std::max(p.psi.tree_residual, p.psi.face_residual);
  c.add("psi_loop_residual", loop <= 1e-12 * std::max(1.0, diam), g6(loop));
  const bool shapes = p.audit.positive_whites == p.audit.whites && p.audit.unclassified == 0 &&
                      p.audit.overlap_area <= 1e-10 * p.audit.total_white_area;
  c.add("psi_white_shapes", shapes, std::to_string(p.audit.positive_whites) + "/" + std::to_string(p.audit.whites));
  c.add("flat_blacks", p.audit.worst_flatness <= 1e-6, g6(p.audit.worst_flatness));
  const ValidationReport rep = validate_tgraph(p.correction.graph);
  c.add("validate_tgraph", rep.ok() && p.correction.merged_label_conflicts == 0,
        rep.ok() ? "ok" : rep.violations[0].kind);

  // Each weight is an inverse piece length; a residual r moves a piece end by
  // at most r, so six weights move the product by about 6 r / min_long.
  auto budget = [](const shape::Pipeline& q) {
    const double r = std::max(q.psi.tree_residual, q.psi.face_residual) +
                     64 * std::numeric_limits<double>::epsilon() * q.correction.graph.diameter();
    return 6 * r / q.correction.min_long;
  };
  const shape::FaceProducts fp = shape::face_weight_products(p.correction.graph, p.arr, p.labels);
  const double eps = budget(p);
  c.add("face_products", fp.faces > 0 && fp.max_dev <= eps, g6(fp.max_dev) + "<=" + g6(eps));

  shape::PipelineOptions raw;
  raw.project = false;
  const shape::Pipeline q = shape::run_pipeline(s, delta, raw);
  const shape::FaceProducts fq = shape::face_weight_products(q.correction.graph, q.arr, q.labels);
  const double eps_q = budget(q);
  c.add("face_products_unprojected", validate_tgraph(q.correction.graph).ok() && fq.max_dev <= eps_q,
        g6(fq.max_dev) + "<=" + g6(eps_q));
  const double secs = seconds_since(t0);
  c.add("seconds", secs < 1200, g6(secs));
  return finish(5, "construction-quality", c,
                {{"burgers_order", burgers_order}, {"defect_slopes", defect}, {"loop_residual", loop},
                 {"worst_flatness", p.audit.worst_flatness}, {"face_products", {fp.faces, fp.max_dev, eps}},
                 {"face_products_unprojected", {fq.faces, fq.max_dev, eps_q}}},
                t0);
}

// ---- 6

CriterionResult cut_fidelity(const VerifyOptions& opt) {
  const auto t0 = Clock::now();
  Checks c;
  (void)opt;
  const shape::LimitShape& s = curved_shape();
  std::vector<double> dev;
  json rows = json::array();
  bool domains = true, hausdorff = true;
  std::string hs, ds;
  for (double delta : kSweep) {
    const shape::Pipeline p = shape::run_pipeline(s, delta);
    const shape::CurvedCut cc = shape::curved_cut_domain(p, *s.analytic, 0.7, 11, 0.7);
    domains = domains && cc.simply_connected && cc.matchable && cc.cut.u_hex.balanced();
    hausdorff = hausdorff && cc.hausdorff <= 3 * delta;
    dev.push_back(cc.boundary_deviation);
    hs += (hs.empty() ? "" : ",") + g6(cc.hausdorff / delta);
    ds += (ds.empty() ? "" : ",") + g6(cc.boundary_deviation);
    rows.push_back({{"delta", delta},
                    {"whites", cc.cut.u_hex.whites.size()},
                    {"hausdorff", cc.hausdorff},
                    {"boundary_deviation", cc.boundary_deviation}});
  }
  c.add("matchable_simply_connected", domains, domains ? "yes" : "no");
  c.add("hausdorff_over_delta", hausdorff, hs);
  bool down = true;
  for (size_t k = 1; k < dev.size(); ++k) down = down && dev[k] <= dev[k - 1];
  c.add("boundary_deviation", down, ds);
  return finish(6, "cut-fidelity", c, {{"rows", rows}}, t0);
}

// ---- 7

namespace {
// Center face and its two rings.
std::vector<hex::HexCoord> center_faces(hex::HexCoord mid) {
  std::vector<hex::HexCoord> F{mid};
  for (auto v : hex::dual_neighbors(mid)) F.push_back(v);
  for (int j = 1; j < 7; ++j)
    for (auto v : hex::dual_neighbors(F[j]))
      if (std::find(F.begin(), F.end(), v) == F.end()) F.push_back(v);
  return F;
}

struct GffRun {
  stats::GffFit fit;
  int skipped = 0;
};

// Eight faces at disk coordinates spread over the domain, 28 pairs.
GffRun gff_run(const shape::LimitShape& s, double delta, double u_radius, int samples, uint64_t seed, int threads) {
  const shape::TestShape& t = *s.analytic;
  const shape::Pipeline p = shape::run_pipeline(s, delta);
  const shape::CurvedCut cc = shape::curved_cut_domain(p, t, u_radius, 11, 0.7);
  const auto base = stats::boundary_face(cc.cut.u_hex, t.phi_inverse(u_radius), delta);
  std::vector<hex::HexCoord> pts;
  std::vector<cplx> u;
  for (int j = 0; j < 8; ++j) {
    const cplx v = std::polar(0.1 + 0.08 * j, 2.4 * j);
    const auto f = cut::nearest_dual(t.phi_inverse(u_radius * v), delta);
    pts.push_back(f);
    u.push_back(t.phi(hex::plane_position(f, delta)) / u_radius);
  }
  const int B = 50;
  std::vector<stats::CovMatrix> cb(B, stats::CovMatrix(8));
  std::vector<int> skipped(B, 0);
  stats::sample_heights(cc.cut, samples, B, seed, threads, base,
                        [&](int b, int, const ust::SpanningTree&, const HexMatching&, const HexHeight* h) {
                          if (!h) {
                            ++skipped[b];
                            return;
                          }
                          Eigen::VectorXd x(8);
                          for (int j = 0; j < 8; ++j) x[j] = h->value(pts[j]);
                          cb[b].add(x);
                        });
  GffRun r;
  r.fit = stats::gff_covariance_fit(cb, u, 400, seed + 1);
  for (int k : skipped) r.skipped += k;
  return r;
}
}  // namespace

CriterionResult fluctuations(const VerifyOptions& opt) {
  const auto t0 = Clock::now();
  Checks c;
  const shape::LimitShape& s = curved_shape();
  const shape::TestShape& t = *s.analytic;
  const int N = 10000, B = 50;
  const double u_radius = 0.7;
  std::vector<std::vector<stats::MomentSet>> sets;
  int skipped = 0;
  for (double delta : kSweep) {
    const shape::Pipeline p = shape::run_pipeline(s, delta);
    const shape::CurvedCut cc = shape::curved_cut_domain(p, t, u_radius, 11, 0.7);
    const auto base = stats::boundary_face(cc.cut.u_hex, t.phi_inverse(u_radius), delta);
    const auto F = center_faces(cut::nearest_dual(t.center(), delta));
    std::vector<stats::MomentSet> b(B, stats::MomentSet(static_cast<int>(F.size())));
    std::vector<int> skip(B, 0);
    std::vector<std::vector<double>> scratch(B, std::vector<double>(F.size()));
    stats::sample_heights(cc.cut, N, B, opt.seed + 7, opt.threads, base,
                          [&](int bi, int, const ust::SpanningTree&, const HexMatching&, const HexHeight* h) {
                            if (!h) {
                              ++skip[bi];
                              return;
                            }
                            for (size_t j = 0; j < F.size(); ++j) scratch[bi][j] = h->value(F[j]);
                            b[bi].add(scratch[bi]);
                          });
    for (int k : skip) skipped += k;
    say(opt, "  variance sweep delta " + g6(delta) + " done");
    sets.push_back(std::move(b));
  }
  const stats::MomentScan scan = stats::height_moment_scan(kSweep, sets, 2, 400, opt.seed + 8, 0.5);
  std::string vars;
  json rows = json::array();
  for (const auto& r : scan.rows) {
    vars += (vars.empty() ? "" : ",") + ci(r.variance);
    rows.push_back({{"delta", r.delta}, {"variance", ci_json(r.variance)}, {"kurtosis", ci_json(r.kurtosis)}});
  }
  c.info("variance", vars);
  c.add("power_law_rejected", scan.power_law_rejected, "alpha=" + ci(scan.alpha));
  const bool polylog = scan.polylog.slope > 0 && scan.polylog.p_value >= 0.05;
  c.add("polylog_fit", polylog, "slope=" + g6(scan.polylog.slope) + ",p=" + g6(scan.polylog.p_value));

  const GffRun d1 = gff_run(s, 1.0 / 32, u_radius, N, opt.seed + 9, opt.threads);
  say(opt, "  covariance domain 1 done");
  const GffRun d2 = gff_run(s, 1.0 / 32, 0.55, N, opt.seed + 10, opt.threads);
  skipped += d1.skipped + d2.skipped;
  c.add("pairs", d1.fit.pairs >= 20, std::to_string(d1.fit.pairs));
  c.add("correlation", d1.fit.correlation.lo >= 0.9 && d1.fit.diagonal_dominant, ci(d1.fit.correlation));
  c.info("correlation_domain2", ci(d2.fit.correlation));
  c.add("kappa_consistent", d1.fit.kappa.overlaps(d2.fit.kappa), ci(d1.fit.kappa) + "~" + ci(d2.fit.kappa));
  c.info("chi_fit", g6(d1.fit.chi_fit));
  c.info("skipped_samples", std::to_string(skipped));
  const double secs = seconds_since(t0);
  c.add("seconds", secs < 1800, g6(secs));
  return finish(7, "fluctuations", c,
                {{"rows", rows},
                 {"alpha", ci_json(scan.alpha)},
                 {"polylog", {scan.polylog.intercept, scan.polylog.slope, scan.polylog.p_value}},
                 {"kappa", {ci_json(d1.fit.kappa), ci_json(d2.fit.kappa)}},
                 {"correlation", {ci_json(d1.fit.correlation), ci_json(d2.fit.correlation)}},
                 {"chi_fit", d1.fit.chi_fit},
                 {"skipped_samples", skipped}},
                t0);
}

// ---- 8

CriterionResult measure_comparison(const VerifyOptions& opt) {
  const auto t0 = Clock::now();
  Checks c;
  const shape::LimitShape& s = curved_shape();
  // The exactly projected construction has face products equal to 1 up to
  // rounding; the comparison runs on the construction with short pieces.
  shape::PipelineOptions po;
  po.project = false;
  std::vector<stats::MeasureReport> reps;
  json rows = json::array();
  for (double delta : kSweep) {
    const shape::Pipeline p = shape::run_pipeline(s, delta, po);
    const shape::CurvedCut cc = shape::curved_cut_domain(p, *s.analytic, 0.7, 11, 0.7);
    reps.push_back(stats::measure_comparison(cc.cut, 10000, opt.seed + 11, 50, 400, opt.threads));
    const auto& r = reps.back();
    say(opt, "  delta " + g6(delta) + " double_long " + ci(r.double_long) + " tv_bound " + ci(r.tv_bound));
    rows.push_back({{"delta", delta},
                    {"faces", r.faces},
                    {"max_face_dev", r.max_face_dev},
                    {"double_long", ci_json(r.double_long)},
                    {"double_long_per_segment", ci_json(r.double_long_per_segment)},
                    {"tv", ci_json(r.tv)},
                    {"tv_bound", ci_json(r.tv_bound)},
                    {"all_standard", ci_json(r.all_standard)},
                    {"extra_edges", ci_json(r.extra_edges)}});
  }
  // no significant increase between consecutive deltas, and lower at the end
  auto decreasing = [&](auto get) {
    for (size_t k = 1; k < reps.size(); ++k)
      if (get(reps[k]).lo > get(reps[k - 1]).hi) return false;
    const double first = get(reps.front()).estimate, last = get(reps.back()).estimate;
    return last < first || (first == 0 && last == 0);
  };
  auto series = [&](auto get) {
    std::string out;
    for (const auto& r : reps) out += (out.empty() ? "" : ",") + ci(get(r));
    return out;
  };
  auto dl = [](const stats::MeasureReport& r) { return r.double_long; };
  auto tv = [](const stats::MeasureReport& r) { return r.tv_bound; };
  c.add("double_long", decreasing(dl), series(dl));
  c.add("tv_bound", decreasing(tv), series(tv));
  std::string dev;
  for (const auto& r : reps) dev += (dev.empty() ? "" : ",") + g6(r.max_face_dev);
  c.info("max_face_dev", dev);
  return finish(8, "measure-comparison", c, {{"rows", rows}}, t0);
}

// ---- suite

std::vector<CriterionResult> run_suite(const std::string& suite, const VerifyOptions& opt,
                                       const std::function<void(const CriterionResult&)>& on_result) {
  using Fn = CriterionResult (*)(const VerifyOptions&);
  const std::vector<std::pair<const char*, Fn>> all{
      {"oracle-exactness", oracle_exactness}, {"ust-dimer-law", ust_dimer_law},
      {"walk-mechanics", walk_mechanics},     {"clt-isotropy", clt_isotropy},
      {"construction-quality", construction_quality}, {"cut-fidelity", cut_fidelity},
      {"fluctuations", fluctuations},         {"measure-comparison", measure_comparison}};
  size_t lo = 0, hi = all.size();
  if (suite == "planar") hi = 4;
  else if (suite == "curved") lo = 4;
  else if (suite != "all") throw Error("BadSuite", "suite must be planar, curved or all: " + suite);
  const auto t0 = Clock::now();
  std::vector<CriterionResult> out;
  for (size_t k = lo; k < hi; ++k) {
    CriterionResult r;
    if (seconds_since(t0) > 60 * opt.budget_minutes) {
      r.id = static_cast<int>(k + 1);
      r.name = all[k].first;
      r.skipped = true;
      r.detail = "budget spent";
    } else {
      say(opt, "criterion " + std::to_string(k + 1) + " " + all[k].first);
      try {
        r = all[k].second(opt);
      } catch (const Error& e) {
        r.id = static_cast<int>(k + 1);
        r.name = all[k].first;
        r.pass = false;
        r.detail = std::string("error=") + e.what();
      }
    }
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_line(const CriterionResult& r) {
  const char* verdict = r.skipped ? "SKIP" : r.pass ? "PASS" : "FAIL";
  return "criterion " + std::to_string(r.id) + " " + r.name + ": " + verdict + "  " + r.detail;
}

}  // namespace tiling::verify

// Command line front end: builds shapes, T-graphs and cut domains, samples
// matchings and walks, runs the exact oracle and the acceptance battery.
#include <fftw3.h>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <boost/version.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "tiling/config.hpp"
#include "tiling/cut.hpp"
#include "tiling/io.hpp"
#include "tiling/oracle.hpp"
#include "tiling/pipeline.hpp"
#include "tiling/render.hpp"
#include "tiling/stats.hpp"
#include "tiling/verify.hpp"

namespace fs = std::filesystem;
using namespace tiling;
using io::json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kValidation = 2, kAcceptance = 3 };

struct Common {
  std::string config_path, out;
  int threads = 0;
  long long seed = -1;
};

struct Run {
  config::RunConfig cfg;
  fs::path dir;
  json manifest;
};

Run start(const std::string& command, const Common& c, const std::vector<std::string>& argv) {
  Run r;
  if (!c.config_path.empty()) r.cfg = config::load(c.config_path);
  if (!c.out.empty()) r.cfg.output = c.out;
  if (c.threads > 0) r.cfg.threads = c.threads;
  if (c.seed >= 0) r.cfg.seed = static_cast<uint64_t>(c.seed);
  r.cfg.validate();
  r.dir = r.cfg.output;
  fs::create_directories(r.dir);
  char eigen[32];
  std::snprintf(eigen, sizeof eigen, "%d.%d.%d", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION);
  json& m = r.manifest;
  m["command"] = command;
  m["argv"] = argv;
  m["config"] = config::to_text(r.cfg);
  m["config_hash"] = config::config_hash(r.cfg);
  m["seeds"] = {{"run", r.cfg.seed}, {"cut", r.cfg.cut_seed}};
  m["versions"] = {{"tiling", "1.0.0"},
                   {"eigen", std::string(eigen)},
                   {"fftw", std::string(fftw_version)},
                   {"boost", BOOST_LIB_VERSION}};
  m["audit"] = json::object();
  m["outputs"] = json::array();
  return r;
}

void finish(Run& r) { io::write_json_file((r.dir / "manifest.json").string(), r.manifest); }

void output(Run& r, const std::string& name) { r.manifest["outputs"].push_back(name); }

json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

shape::LimitShape make_shape(const config::RunConfig& cfg) {
  return shape::make_test_shape(cfg.shape, cfg.grid, cfg.NM);
}

json pipeline_audit(const shape::Pipeline& p) {
  const auto& c = p.correction;
  return {{"delta", p.fg.delta},
          {"defect_sup", p.defect.sup},
          {"projection_defect_after", p.projection.defect_after},
          {"lambda", cjson(p.lambda.lambda)},
          {"lambda_margin", p.lambda.margin},
          {"psi_tree_residual", p.psi.tree_residual},
          {"psi_face_residual", p.psi.face_residual},
          {"psi_max_phi_deviation", p.audit.max_psi_phi},
          {"positive_whites", p.audit.positive_whites},
          {"whites", p.audit.whites},
          {"worst_flatness", p.audit.worst_flatness},
          {"eps_short", c.eps_short},
          {"min_long", c.min_long},
          {"short_pieces", c.short_pieces},
          {"label_conflicts", c.merged_label_conflicts},
          {"labeled_faces", p.labels.labeled},
          {"faces", p.labels.faces}};
}

// ---- subcommands

int build_shape(Run& r) {
  const shape::LimitShape s = make_shape(r.cfg);
  double burgers = 0;
  for (const cplx& x : shape::burgers_residual(s)) burgers = std::max(burgers, std::abs(x));
  json inside = json::array(), hC = json::array(), Phi = json::array(), phi = json::array();
  for (size_t k = 0; k < s.grid.size(); ++k) {
    inside.push_back(static_cast<int>(s.inside[k]));
    hC.push_back(s.inside[k] ? s.hC[k] : 0.0);
    Phi.push_back(cjson(s.inside[k] ? s.Phi[k] : cplx(0)));
    phi.push_back(cjson(s.inside[k] ? s.phi[k] : cplx(0)));
  }
  const json j = {{"schema", "shape-1"},
                  {"grid", {{"origin", cjson(s.grid.origin)}, {"h", s.grid.h}, {"nx", s.grid.nx}, {"ny", s.grid.ny}}},
                  {"center", {s.center_i, s.center_j}},
                  {"inside", inside},
                  {"hC", hC},
                  {"Phi", Phi},
                  {"phi", phi}};
  io::write_json_file((r.dir / "shape.json").string(), j);
  output(r, "shape.json");
  r.manifest["audit"] = {{"burgers_residual", burgers},
                         {"hC_path_residual", s.hC_path_residual},
                         {"H_path_residual", s.H_path_residual}};
  std::cout << "shape.json: " << s.grid.nx << "x" << s.grid.ny << " grid, burgers residual " << burgers << "\n";
  return kOk;
}

int build_planar(Run& r) {
  const planar::Patch patch = planar::build_whole_plane_patch(
      r.cfg.planar, planar::Window::disk(0, r.cfg.planar_radius * r.cfg.planar_mesh), r.cfg.planar_mesh);
  const planar::GeometryReport geo = planar::geometry_report(patch);
  const ValidationReport rep = validate_tgraph(patch.graph);
  io::write_json_file((r.dir / "planar.tg1.json").string(),
                      io::tgraph_to_json(patch.graph, {{"source", "planar"}, {"mesh", patch.mesh}}));
  output(r, "planar.tg1.json");
  r.manifest["audit"] = {{"valid", rep.ok()},
                         {"overlap_area", geo.overlap_area},
                         {"total_white_area", geo.total_white_area},
                         {"interior_of_one", geo.interior_of_one},
                         {"endpoint_of_six", geo.endpoint_of_six},
                         {"unclassified", geo.unclassified},
                         {"max_drift_deviation", geo.max_drift_deviation},
                         {"degenerate_whites", patch.degenerate_whites.size()}};
  std::cout << "planar.tg1.json: " << patch.graph.num_vertices() << " vertices, " << patch.graph.num_segments()
            << " segments, " << (rep.ok() ? "valid" : "INVALID") << "\n";
  for (const auto& v : rep.violations) std::cerr << v.kind << ": " << v.detail << "\n";
  return rep.ok() ? kOk : kValidation;
}

int build_graph(Run& r, bool with_cut) {
  const shape::LimitShape s = make_shape(r.cfg);
  const shape::Pipeline p = shape::run_pipeline(s, r.cfg.delta, r.cfg.pipeline_options());
  const ValidationReport rep = validate_tgraph(p.correction.graph);
  json audit = pipeline_audit(p);
  audit["valid"] = rep.ok();
  io::write_json_file((r.dir / "graph.tg1.json").string(),
                      io::tgraph_to_json(p.correction.graph, {{"source", "shape"}, {"delta", r.cfg.delta}}));
  output(r, "graph.tg1.json");
  if (with_cut) {
    const shape::CurvedCut cc = shape::curved_cut_domain(p, *s.analytic, r.cfg.u_radius, r.cfg.cut_seed,
                                                         r.cfg.width_factor);
    io::write_json_file((r.dir / "cut.tg1.json").string(),
                        io::tgraph_to_json(cc.cut.gamma, {{"source", "cut"}, {"delta", r.cfg.delta}}));
    json region = io::region_to_json(cc.cut.u_hex);
    region["schema"] = "region-1";
    io::write_json_file((r.dir / "region.json").string(), region);
    output(r, "cut.tg1.json");
    output(r, "region.json");
    audit["cut"] = {{"hausdorff", cc.hausdorff},
                    {"boundary_deviation", cc.boundary_deviation},
                    {"simply_connected", cc.simply_connected},
                    {"matchable", cc.matchable},
                    {"whites", cc.cut.u_hex.whites.size()}};
  }
  r.manifest["audit"] = audit;
  std::cout << "graph.tg1.json: " << p.correction.graph.num_segments() << " segments, "
            << (rep.ok() ? "valid" : "INVALID") << ", psi residual " << p.psi.tree_residual << "\n";
  for (const auto& v : rep.violations) std::cerr << v.kind << ": " << v.detail << "\n";
  return rep.ok() ? kOk : kValidation;
}

int sample(Run& r, const std::string& domain) {
  std::optional<shape::LimitShape> s;
  std::optional<shape::Pipeline> p;
  cut::CutDomain cd;
  if (domain == "flat") {
    cd = cut::make_flat_cut(r.cfg.planar, r.cfg.planar_radius, r.cfg.cut_seed).cut;
  } else {
    s = make_shape(r.cfg);
    p = shape::run_pipeline(*s, r.cfg.delta, r.cfg.pipeline_options());
    auto cc = shape::curved_cut_domain(*p, *s->analytic, r.cfg.u_radius, r.cfg.cut_seed, r.cfg.width_factor);
    r.manifest["audit"] = pipeline_audit(*p);
    cd = std::move(cc.cut);
  }
  if (!cd.labeled) throw Error("Unlabeled", "cut domain has no lattice labels");
  const int N = r.cfg.samples;
  const int B = std::min(r.cfg.batches, N);
  std::vector<HexMatching> ms(N);
  std::vector<char> honeycomb(N, 1);
  const hex::HexCoord base = central_face(cd.u_hex);
  stats::sample_heights(cd, N, B, r.cfg.seed, r.cfg.threads, base,
                        [&](int, int i, const ust::SpanningTree&, const HexMatching& m, const HexHeight* h) {
                          ms[i] = m;
                          honeycomb[i] = h != nullptr;
                        });
  std::ofstream out(r.dir / "matchings.jsonl");
  out << io::matchings_header(cd.u_hex, {{"domain", domain}, {"seed", r.cfg.seed}});
  int extra = 0;
  for (int i = 0; i < N; ++i) {
    if (!honeycomb[i]) {
      ++extra;
      continue;
    }
    out << io::matching_line(i, ms[i]);
  }
  output(r, "matchings.jsonl");
  r.manifest["audit"]["samples"] = N;
  r.manifest["audit"]["dropped_extra_edge_samples"] = extra;
  std::cout << "matchings.jsonl: " << N - extra << " matchings of " << cd.u_hex.whites.size() << " whites\n";
  return kOk;
}

int walk_cmd(Run& r, const std::string& graph_path, std::vector<double> start, double t_max, int paths) {
  TGraph g;
  if (graph_path.empty()) {
    g = planar::build_whole_plane_patch(r.cfg.planar, planar::Window::disk(0, r.cfg.planar_radius * r.cfg.planar_mesh),
                                        r.cfg.planar_mesh)
            .graph;
  } else {
    g = io::tgraph_from_json(io::read_json_file(graph_path));
  }
  const int v0 = stats::nearest_interior_vertex(g, {start.at(0), start.at(1)});
  walk::JumpTable jt(g);
  walk::StopRule rule;
  rule.t_max = t_max;
  std::ofstream out(r.dir / "walks.csv");
  out << "path,step,time,x,y,vertex\n";
  out.precision(17);
  json reasons = json::array();
  for (int i = 0; i < paths; ++i) {
    const walk::WalkPath p = walk::sample_path(g, jt, v0, rule, r.cfg.seed, i);
    for (size_t k = 0; k < p.vertices.size(); ++k) {
      const cplx z = g.points[p.vertices[k]];
      out << i << ',' << k << ',' << p.times[k] << ',' << z.real() << ',' << z.imag() << ',' << p.vertices[k] << '\n';
    }
    reasons.push_back(static_cast<int>(p.reason));
  }
  output(r, "walks.csv");
  r.manifest["audit"] = {{"start_vertex", v0}, {"stop_reasons", reasons}};
  std::cout << "walks.csv: " << paths << " paths from vertex " << v0 << "\n";
  return kOk;
}

int oracle_cmd(Run& r, const std::vector<int>& hexagon, const std::string& region_path, bool enumerate) {
  HexSubgraph g;
  if (!region_path.empty()) g = io::region_from_json(io::read_json_file(region_path));
  else if (hexagon.size() == 3) g = hexagon_region(hexagon[0], hexagon[1], hexagon[2]);
  else throw CLI::ValidationError("oracle", "give --hexagon a,b,c or --region FILE");
  const oracle::BigInt count = oracle::count_matchings(g);
  json audit = {{"whites", g.whites.size()}, {"blacks", g.blacks.size()}, {"count", count.str()}};
  if (enumerate) {
    const uint64_t e = oracle::enumerate_matchings(g);
    audit["enumerated"] = e;
    if (oracle::BigInt(e) != count) {
      r.manifest["audit"] = audit;
      std::cerr << "determinant " << count << " != enumeration " << e << "\n";
      return kValidation;
    }
  }
  std::cout << "matchings: " << count << "\n";
  if (count > 0) {
    const auto P = oracle::edge_probabilities(g);
    std::ofstream out(r.dir / "edge_probabilities.csv");
    out << "white_m,white_n,black_m,black_n,type,probability\n";
    out.precision(17);
    for (size_t w = 0; w < g.whites.size(); ++w)
      for (int s = 0; s < 3; ++s) {
        const int b = g.white_nb[w][s];
        if (b < 0) continue;
        out << g.whites[w].m << ',' << g.whites[w].n << ',' << g.blacks[b].m << ',' << g.blacks[b].n << ','
            << "abc"[s] << ',' << P[w][s] << '\n';
      }
    output(r, "edge_probabilities.csv");
  }
  r.manifest["audit"] = audit;
  return kOk;
}

int verify_cmd(Run& r, const std::string& suite, double budget) {
  verify::VerifyOptions opt;
  opt.seed = r.cfg.seed;
  opt.threads = r.cfg.threads;
  opt.budget_minutes = budget;
  opt.log = [](const std::string& s) { std::cerr << s << std::endl; };
  json results = json::array();
  bool ok = true;
  std::ofstream csv(r.dir / "verify.csv");
  csv << "criterion,name,verdict,seconds\n";
  verify::run_suite(suite, opt, [&](const verify::CriterionResult& c) {
    std::cout << verify::format_line(c) << std::endl;
    ok = ok && c.pass && !c.skipped;
    const char* verdict = c.skipped ? "SKIP" : c.pass ? "PASS" : "FAIL";
    csv << c.id << ',' << c.name << ',' << verdict << ',' << c.seconds << '\n';
    results.push_back({{"id", c.id},
                       {"name", c.name},
                       {"verdict", verdict},
                       {"detail", c.detail},
                       {"metrics", c.metrics}});
  });
  io::write_json_file((r.dir / "verify.json").string(), {{"suite", suite}, {"results", results}});
  output(r, "verify.json");
  output(r, "verify.csv");
  r.manifest["audit"] = {{"suite", suite}, {"pass", ok}};
  return ok ? kOk : kAcceptance;
}

int render_cmd(Run& r, const std::string& path, size_t index, const std::string& svg, bool heights) {
  const io::MatchingsFile f = io::read_matchings(path);
  if (index >= f.matchings.size()) throw CLI::ValidationError("render", "--index past the last matching");
  render::Style style;
  style.heights = heights;
  const std::string doc = render::render_tiling(f.region, f.matchings[index], style);
  io::write_text_file((r.dir / svg).string(), doc);
  output(r, svg);
  r.manifest["audit"] = {{"matchings_file", path}, {"index", f.index[index]}};
  std::cout << svg << ": " << f.region.whites.size() << " lozenges\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lozenge tilings from T-graph random walks"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", common.out, "output directory (overrides run.output)");
    sub->add_option("--threads", common.threads, "sampling threads (overrides run.threads)")->check(CLI::PositiveNumber);
    sub->add_option("--seed", common.seed, "seed (overrides run.seed)")->check(CLI::NonNegativeNumber);
  };

  auto* c_shape = app.add_subcommand("build-shape", "grid the test limit shape");
  auto* c_planar = app.add_subcommand("build-planar", "whole-plane T-graph patch of the planar family");
  auto* c_graph = app.add_subcommand("build-graph", "T-graph of the test shape at mesh delta");
  bool with_cut = false;
  c_graph->add_flag("--cut", with_cut, "also write the cut domain and its hex region");
  auto* c_sample = app.add_subcommand("sample", "sample matchings of a cut domain through Wilson's algorithm");
  std::string domain = "curved";
  c_sample->add_option("--domain", domain, "curved or flat")->check(CLI::IsMember({"curved", "flat"}));
  auto* c_walk = app.add_subcommand("walk", "sample walk paths on a T-graph");
  std::string graph_path;
  std::vector<double> start_xy{0, 0};
  double t_max = 100;
  int paths = 10;
  c_walk->add_option("--graph", graph_path, "tg-1 graph (default: the configured planar patch)")
      ->check(CLI::ExistingFile);
  c_walk->add_option("--start", start_xy, "start point x y")->expected(2);
  c_walk->add_option("--t-max", t_max, "time cap")->check(CLI::PositiveNumber);
  c_walk->add_option("--paths", paths, "number of paths")->check(CLI::PositiveNumber);
  auto* c_oracle = app.add_subcommand("oracle", "exact matching count and edge probabilities");
  std::vector<int> hexagon;
  std::string region_path;
  bool enumerate = false;
  c_oracle->add_option("--hexagon", hexagon, "side lengths a,b,c")->delimiter(',')->expected(3);
  c_oracle->add_option("--region", region_path, "region JSON")->check(CLI::ExistingFile);
  c_oracle->add_flag("--enumerate", enumerate, "cross-check the count by enumeration");
  auto* c_verify = app.add_subcommand("verify", "run the acceptance battery");
  std::string suite = "all";
  double budget = std::numeric_limits<double>::infinity();
  c_verify->add_option("--suite", suite, "planar, curved or all")->check(CLI::IsMember({"planar", "curved", "all"}));
  c_verify->add_option("--budget", budget, "minutes; criteria not started in time are skipped")
      ->check(CLI::PositiveNumber);
  auto* c_render = app.add_subcommand("render", "SVG lozenge picture of a sampled matching");
  std::string matchings_path, svg = "tiling.svg";
  size_t index = 0;
  bool heights = false;
  c_render->add_option("--matchings", matchings_path, "matchings.jsonl")->required()->check(CLI::ExistingFile);
  c_render->add_option("--index", index, "matching to draw (position in the file)");
  c_render->add_option("--svg", svg, "output file name inside the output directory");
  c_render->add_flag("--heights", heights, "label faces with their heights");

  for (auto* sub : app.get_subcommands({})) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::vector<std::string> args(argv, argv + argc);
  try {
    Run r = start(sub->get_name(), common, args);
    int code = kOk;
    if (sub == c_shape) code = build_shape(r);
    else if (sub == c_planar) code = build_planar(r);
    else if (sub == c_graph) code = build_graph(r, with_cut);
    else if (sub == c_sample) code = sample(r, domain);
    else if (sub == c_walk) code = walk_cmd(r, graph_path, start_xy, t_max, paths);
    else if (sub == c_oracle) code = oracle_cmd(r, hexagon, region_path, enumerate);
    else if (sub == c_verify) code = verify_cmd(r, suite, budget);
    else if (sub == c_render) code = render_cmd(r, matchings_path, index, svg, heights);
    r.manifest["exit_code"] = code;
    finish(r);
    return code;
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return e.kind() == "BadConfig" || e.kind() == "BadSuite" ? kUsage : kValidation;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kValidation;
  }
}

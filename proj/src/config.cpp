#include "tiling/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace tiling::config {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
std::string fmt(cplx z) { return fmt(z.real()) + " " + fmt(z.imag()); }

std::vector<double> numbers(const std::string& v, size_t want) {
  std::istringstream is(v);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) {
    size_t used = 0;
    double x = 0;
    try {
      x = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw Error("BadConfig", "not a number: " + tok);
    out.push_back(x);
  }
  if (out.size() != want) throw Error("BadConfig", "expected " + std::to_string(want) + " number(s): " + v);
  return out;
}

double real_of(const std::string& v) { return numbers(v, 1)[0]; }
cplx complex_of(const std::string& v) {
  auto x = numbers(v, 2);
  return {x[0], x[1]};
}
int int_of(const std::string& v) {
  const double x = real_of(v);
  if (x != static_cast<int>(x)) throw Error("BadConfig", "not an integer: " + v);
  return static_cast<int>(x);
}
uint64_t seed_of(const std::string& v) {
  size_t used = 0;
  uint64_t s = 0;
  try {
    s = std::stoull(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size()) throw Error("BadConfig", "not a seed: " + v);
  return s;
}
bool bool_of(const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw Error("BadConfig", "not a boolean: " + v);
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> s{
      {"shape.c0", [](RunConfig& c, auto& v) { c.shape.c0 = complex_of(v); }},
      {"shape.c1", [](RunConfig& c, auto& v) { c.shape.c1 = complex_of(v); }},
      {"shape.c2", [](RunConfig& c, auto& v) { c.shape.c2 = complex_of(v); }},
      {"shape.zeta_center", [](RunConfig& c, auto& v) { c.shape.zeta_center = complex_of(v); }},
      {"shape.rho", [](RunConfig& c, auto& v) { c.shape.rho = real_of(v); }},
      {"shape.extension", [](RunConfig& c, auto& v) { c.shape.extension = real_of(v); }},
      {"shape.grid", [](RunConfig& c, auto& v) { c.grid = int_of(v); }},
      {"planar.A", [](RunConfig& c, auto& v) { c.planar.A = complex_of(v); }},
      {"planar.B", [](RunConfig& c, auto& v) { c.planar.B = complex_of(v); }},
      {"planar.C", [](RunConfig& c, auto& v) { c.planar.C = complex_of(v); }},
      {"planar.lambda", [](RunConfig& c, auto& v) { c.planar.lambda = complex_of(v); }},
      {"planar.radius", [](RunConfig& c, auto& v) { c.planar_radius = real_of(v); }},
      {"planar.mesh", [](RunConfig& c, auto& v) { c.planar_mesh = real_of(v); }},
      {"run.delta", [](RunConfig& c, auto& v) { c.delta = real_of(v); }},
      {"run.seed", [](RunConfig& c, auto& v) { c.seed = seed_of(v); }},
      {"run.samples", [](RunConfig& c, auto& v) { c.samples = int_of(v); }},
      {"run.batches", [](RunConfig& c, auto& v) { c.batches = int_of(v); }},
      {"run.bootstrap", [](RunConfig& c, auto& v) { c.bootstrap = int_of(v); }},
      {"run.threads", [](RunConfig& c, auto& v) { c.threads = int_of(v); }},
      {"run.output", [](RunConfig& c, auto& v) { c.output = v; }},
      {"knobs.NM", [](RunConfig& c, auto& v) { c.NM = int_of(v); }},
      {"knobs.eps_short", [](RunConfig& c, auto& v) { c.eps_short = real_of(v); }},
      {"knobs.project", [](RunConfig& c, auto& v) { c.project = bool_of(v); }},
      {"knobs.u_radius", [](RunConfig& c, auto& v) { c.u_radius = real_of(v); }},
      {"knobs.width_factor", [](RunConfig& c, auto& v) { c.width_factor = real_of(v); }},
      {"knobs.cut_seed", [](RunConfig& c, auto& v) { c.cut_seed = seed_of(v); }},
  };
  return s;
}

}  // namespace

bool RunConfig::operator==(const RunConfig& o) const {
  auto same_shape = [](const shape::TestShapeParams& a, const shape::TestShapeParams& b) {
    return a.c0 == b.c0 && a.c1 == b.c1 && a.c2 == b.c2 && a.zeta_center == b.zeta_center && a.rho == b.rho &&
           a.extension == b.extension;
  };
  auto same_planar = [](const planar::PlanarParams& a, const planar::PlanarParams& b) {
    return a.A == b.A && a.B == b.B && a.C == b.C && a.lambda == b.lambda;
  };
  return same_shape(shape, o.shape) && grid == o.grid && same_planar(planar, o.planar) &&
         planar_radius == o.planar_radius && planar_mesh == o.planar_mesh && delta == o.delta && seed == o.seed &&
         samples == o.samples && batches == o.batches && bootstrap == o.bootstrap && threads == o.threads &&
         output == o.output && NM == o.NM && eps_short == o.eps_short && project == o.project &&
         u_radius == o.u_radius && width_factor == o.width_factor && cut_seed == o.cut_seed &&
         tolerances == o.tolerances;
}

void RunConfig::validate() const {
  auto bad = [](const std::string& key, const std::string& why) { throw Error("BadConfig", key + ": " + why); };
  if (!(shape.rho > 0)) bad("shape.rho", "must be positive");
  if (!(shape.extension > 1)) bad("shape.extension", "must exceed 1");
  if (grid < 17 || grid > 2049) bad("shape.grid", "must lie in [17, 2049]");
  if (!(planar_radius > 0)) bad("planar.radius", "must be positive");
  if (!(planar_mesh > 0)) bad("planar.mesh", "must be positive");
  try {
    planar.check();
  } catch (const Error& e) {
    bad("planar", e.what());
  }
  if (!(delta > 0 && delta <= 0.5)) bad("run.delta", "must lie in (0, 1/2]");
  if (samples < 1) bad("run.samples", "must be positive");
  if (threads < 1) bad("run.threads", "must be positive");
  if (output.empty()) bad("run.output", "must not be empty");
  if (NM != 0 && NM != 1) bad("knobs.NM", "must be 0 or 1");
  if (eps_short > 0 && eps_short >= delta) bad("knobs.eps_short", "must be far below delta");
  if (!(u_radius > 0 && u_radius < 1)) bad("knobs.u_radius", "must lie in (0, 1)");
  if (!(width_factor > 0)) bad("knobs.width_factor", "must be positive");
  stats().validate();
}

stats::StatsConfig RunConfig::stats() const {
  stats::StatsConfig s;
  s.samples = samples;
  s.batches = batches;
  s.bootstrap = bootstrap;
  s.threads = threads;
  s.seed = seed;
  s.deltas = {delta};
  s.tolerances = tolerances;
  return s;
}

shape::PipelineOptions RunConfig::pipeline_options() const {
  shape::PipelineOptions o;
  o.NM = NM;
  o.project = project;
  o.correction.eps_short = eps_short;
  return o;
}

RunConfig parse(const std::string& text) {
  RunConfig c;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw Error("BadConfig", where + "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "shape" && section != "planar" && section != "run" && section != "knobs" &&
          section != "tolerances")
        throw Error("BadConfig", where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error("BadConfig", where + "expected key = value");
    if (section.empty()) throw Error("BadConfig", where + "key outside a section");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    try {
      if (section == "tolerances") {
        c.tolerances[key] = real_of(value);
        continue;
      }
      auto it = setters().find(section + "." + key);
      if (it == setters().end()) throw Error("BadConfig", "unknown key " + section + "." + key);
      it->second(c, value);
    } catch (const Error& e) {
      throw Error("BadConfig", where + e.what());
    }
  }
  return c;
}

std::string to_text(const RunConfig& c) {
  std::ostringstream os;
  os << "[shape]\n"
     << "c0 = " << fmt(c.shape.c0) << "\n"
     << "c1 = " << fmt(c.shape.c1) << "\n"
     << "c2 = " << fmt(c.shape.c2) << "\n"
     << "zeta_center = " << fmt(c.shape.zeta_center) << "\n"
     << "rho = " << fmt(c.shape.rho) << "\n"
     << "extension = " << fmt(c.shape.extension) << "\n"
     << "grid = " << c.grid << "\n\n"
     << "[planar]\n"
     << "A = " << fmt(c.planar.A) << "\n"
     << "B = " << fmt(c.planar.B) << "\n"
     << "C = " << fmt(c.planar.C) << "\n"
     << "lambda = " << fmt(c.planar.lambda) << "\n"
     << "radius = " << fmt(c.planar_radius) << "\n"
     << "mesh = " << fmt(c.planar_mesh) << "\n\n"
     << "[run]\n"
     << "delta = " << fmt(c.delta) << "\n"
     << "seed = " << c.seed << "\n"
     << "samples = " << c.samples << "\n"
     << "batches = " << c.batches << "\n"
     << "bootstrap = " << c.bootstrap << "\n"
     << "threads = " << c.threads << "\n"
     << "output = " << c.output << "\n\n"
     << "[knobs]\n"
     << "NM = " << c.NM << "\n"
     << "eps_short = " << fmt(c.eps_short) << "\n"
     << "project = " << (c.project ? "true" : "false") << "\n"
     << "u_radius = " << fmt(c.u_radius) << "\n"
     << "width_factor = " << fmt(c.width_factor) << "\n"
     << "cut_seed = " << c.cut_seed << "\n\n"
     << "[tolerances]\n";
  for (auto& [k, v] : c.tolerances) os << k << " = " << fmt(v) << "\n";
  return os.str();
}

RunConfig load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("BadConfig", "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string config_hash(const RunConfig& c) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : to_text(c)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace tiling::config

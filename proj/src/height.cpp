#include "tiling/height.hpp"

#include <cmath>
#include <map>
#include <queue>

namespace tiling {

using hex::HexCoord;

double HexHeight::value(const HexCoord& v) const {
  auto it = numer.find(hex_key(v));
  if (it == numer.end()) throw Error("NoFace", "face outside the region");
  return static_cast<double>(it->second) / 3.0;
}

HexCoord central_face(const HexSubgraph& g) {
  cplx c = 0;
  int k = 0;
  for (const auto& w : g.whites) {
    c += hex::plane_position(w);
    ++k;
  }
  for (const auto& b : g.blacks) {
    c += hex::plane_position(b);
    ++k;
  }
  if (k) c /= static_cast<double>(k);
  HexCoord best{};
  double bd = 1e300;
  for (const auto& v : g.faces()) {
    const double d = std::abs(hex::plane_position(v) - c);
    if (d < bd - 1e-12) {
      bd = d;
      best = v;
    }
  }
  return best;
}

namespace {
constexpr int kSteps[6][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 0}, {-1, -1}, {0, -1}};

// Increment in thirds across v -> v+step, or nullopt if the crossed edge is
// not in the subgraph.
std::optional<int64_t> increment(const HexSubgraph& g, const HexMatching& m, const HexCoord& v, int s) {
  auto c = hex::dual_crossing(v, kSteps[s][0], kSteps[s][1]);
  const int wi = g.white_index(c.w), bi = g.black_index(c.b);
  if (wi < 0 || bi < 0) return std::nullopt;
  return c.sign * (3 * (m[wi] == bi ? 1 : 0) - 1);
}

void require_perfect(const HexSubgraph& g, const HexMatching& m) {
  if (!is_perfect(g, m)) throw Error("NotPerfect", "matching is not a perfect matching of the region");
}
}  // namespace

HexHeight height_from_matching(const HexSubgraph& g, const HexMatching& m, std::optional<HexCoord> base) {
  require_perfect(g, m);
  HexHeight h;
  h.base = base ? *base : central_face(g);
  std::queue<HexCoord> q;
  h.numer[hex_key(h.base)] = 0;
  q.push(h.base);
  while (!q.empty()) {
    HexCoord v = q.front();
    q.pop();
    const int64_t hv = h.numer[hex_key(v)];
    for (int s = 0; s < 6; ++s) {
      auto inc = increment(g, m, v, s);
      if (!inc) continue;
      HexCoord u = hex::dual(v.m + kSteps[s][0], v.n + kSteps[s][1]);
      if (h.numer.emplace(hex_key(u), hv + *inc).second) q.push(u);
    }
  }
  return h;
}

int64_t height_loop_defect(const HexSubgraph& g, const HexMatching& m) {
  auto h = height_from_matching(g, m);
  int64_t worst = 0;
  for (const auto& [key, hv] : h.numer) {
    HexCoord v = hex::dual(static_cast<int64_t>(key >> 32) - (1LL << 31),
                           static_cast<int64_t>(static_cast<uint32_t>(key)) - (1LL << 31));
    for (int s = 0; s < 6; ++s) {
      auto inc = increment(g, m, v, s);
      if (!inc) continue;
      HexCoord u = hex::dual(v.m + kSteps[s][0], v.n + kSteps[s][1]);
      auto it = h.numer.find(hex_key(u));
      if (it != h.numer.end()) worst = std::max<int64_t>(worst, std::llabs(it->second - hv - *inc));
    }
  }
  return worst;
}

double MrefFlow::value(int black, int white) const {
  for (const auto& e : entries)
    if (e.black == black && e.white == white) return e.weight;
  return 0;
}

MrefFlow reference_flow(const TGraph& g, const Arrangement& arr) {
  std::map<std::pair<int, int>, double> acc;
  const double eps_angle = 1e-12;
  for (const auto& f : arr.faces) {
    const size_t k = f.half_edges.size();
    for (size_t i = 0; i < k; ++i) {
      const int hin = f.half_edges[(i + k - 1) % k], hout = f.half_edges[i];
      const int x = f.cycle[i];
      const int pin = hin / 2, pout = hout / 2;
      const int sin_ = g.piece_segment(pin), sout = g.piece_segment(pout);
      if (sin_ == sout) continue;
      const cplx a = g.points[f.cycle[(i + k - 1) % k]], b = g.points[x], c = g.points[f.cycle[(i + 1) % k]];
      const cplx din = (b - a) / std::abs(b - a), dout = (c - b) / std::abs(c - b);
      const double turn = std::atan2(cross(din, dout), dot(din, dout));
      if (std::abs(turn) < eps_angle) continue;
      // the segment that ends at x carries the corner
      auto ends_at = [&](int s) { return g.segments[s].front() == x || g.segments[s].back() == x; };
      int s = -1;
      if (ends_at(sin_) && !ends_at(sout))
        s = sin_;
      else if (ends_at(sout) && !ends_at(sin_))
        s = sout;
      else if (ends_at(sin_) && ends_at(sout))
        s = g.host(x) == sout ? sin_ : sout;
      if (s < 0) continue;
      acc[{s, f.id}] += turn / (2 * kPi);
    }
  }
  MrefFlow out;
  for (auto& [key, v] : acc) out.entries.push_back({key.first, key.second, v});
  return out;
}

std::vector<double> flow_divergence_black(const MrefFlow& f, int num_blacks) {
  std::vector<double> d(num_blacks, 0);
  for (const auto& e : f.entries) d[e.black] += e.weight;
  return d;
}

std::vector<double> flow_divergence_white(const MrefFlow& f, int num_whites) {
  std::vector<double> d(num_whites, 0);
  for (const auto& e : f.entries) d[e.white] += e.weight;
  return d;
}

double winding(const std::vector<cplx>& path) {
  if (path.size() < 2) throw Error("ZeroStep", "path needs two points");
  std::vector<cplx> steps;
  for (size_t i = 0; i + 1 < path.size(); ++i) {
    const cplx d = path[i + 1] - path[i];
    if (std::abs(d) == 0) throw Error("ZeroStep", "repeated point in path");
    steps.push_back(d);
  }
  const bool closed = path.size() > 2 && std::abs(path.front() - path.back()) == 0;
  double w = 0;
  for (size_t i = 0; i + 1 < steps.size(); ++i) w += std::arg(steps[i + 1] / steps[i]);
  if (closed) w += std::arg(steps.front() / steps.back());
  return w;
}

}  // namespace tiling

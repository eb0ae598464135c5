#include "tiling/render.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "tiling/height.hpp"

namespace tiling::render {

namespace {
std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x == 0 ? 0.0 : x);  // no "-0.000"
  return buf;
}
}  // namespace

std::string render_tiling(const HexSubgraph& g, const HexMatching& m, const Style& style) {
  if (!is_perfect(g, m)) throw Error("NotPerfect", "matching is not a perfect matching of the region");
  std::vector<std::array<cplx, 4>> quads;
  std::vector<int> type;
  double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
  for (size_t w = 0; w < g.whites.size(); ++w) {
    const auto& wc = g.whites[w];
    const auto& bc = g.blacks[m[w]];
    const auto wf = hex::white_face(wc);
    const auto bf = hex::black_face(bc);
    std::vector<hex::HexCoord> shared, wu, bu;
    for (auto& v : wf) (std::find(bf.begin(), bf.end(), v) != bf.end() ? shared : wu).push_back(v);
    for (auto& v : bf)
      if (std::find(wf.begin(), wf.end(), v) == wf.end()) bu.push_back(v);
    if (shared.size() != 2 || wu.size() != 1 || bu.size() != 1) throw Error("NotPerfect", "matched pair is not an edge");
    std::array<cplx, 4> q{};
    const hex::HexCoord order[4] = {wu[0], shared[0], bu[0], shared[1]};
    for (int k = 0; k < 4; ++k) {
      // SVG y axis points down
      const cplx z = hex::plane_position(order[k]) * style.scale;
      q[k] = {z.real(), -z.imag()};
      x0 = std::min(x0, q[k].real());
      x1 = std::max(x1, q[k].real());
      y0 = std::min(y0, q[k].imag());
      y1 = std::max(y1, q[k].imag());
    }
    quads.push_back(q);
    type.push_back(static_cast<int>(hex::edge_type(wc, bc)));
  }
  const double pad = style.scale * 0.5;
  if (quads.empty()) x0 = y0 = x1 = y1 = 0;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << num(x0 - pad) << ' ' << num(y0 - pad) << ' '
     << num(x1 - x0 + 2 * pad) << ' ' << num(y1 - y0 + 2 * pad) << "\">\n";
  os << "<g stroke=\"" << style.stroke << "\" stroke-width=\"" << num(style.stroke_width)
     << "\" stroke-linejoin=\"round\">\n";
  for (size_t k = 0; k < quads.size(); ++k) {
    os << "<polygon fill=\"" << style.fill[type[k]] << "\" points=\"";
    for (int i = 0; i < 4; ++i) os << (i ? " " : "") << num(quads[k][i].real()) << ',' << num(quads[k][i].imag());
    os << "\"/>\n";
  }
  os << "</g>\n";
  if (style.heights && !g.whites.empty()) {
    const HexHeight h = height_from_matching(g, m);
    std::vector<hex::HexCoord> faces = g.faces();
    std::sort(faces.begin(), faces.end(), [](auto& a, auto& b) { return a.m != b.m ? a.m < b.m : a.n < b.n; });
    os << "<g font-size=\"" << num(style.scale * 0.35) << "\" text-anchor=\"middle\" fill=\"#c00000\">\n";
    for (const auto& f : faces) {
      if (!h.has(f)) continue;
      const cplx z = hex::plane_position(f) * style.scale;
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.2f", h.value(f));
      os << "<text x=\"" << num(z.real()) << "\" y=\"" << num(-z.imag()) << "\">" << buf << "</text>\n";
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace tiling::render

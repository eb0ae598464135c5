#pragma once

#include <array>
#include <string>

#include "tiling/hexgraph.hpp"

namespace tiling::render {

struct Style {
  double scale = 20;  // pixels per lattice unit
  std::array<std::string, 3> fill{"#d8d8d8", "#8c8c8c", "#4a4a4a"};  // edge types a, b, c
  std::string stroke = "#000000";
  double stroke_width = 0.6;
  bool heights = false;  // label dual vertices with their heights
};

// Lozenge picture of a perfect matching: each matched edge is drawn as the
// union of the two lattice triangles dual to its ends. NotPerfect.
std::string render_tiling(const HexSubgraph& g, const HexMatching& m, const Style& style = {});

}  // namespace tiling::render

#pragma once

#include <map>
#include <string>

#include "tiling/pipeline.hpp"
#include "tiling/planar.hpp"
#include "tiling/shape.hpp"
#include "tiling/stats.hpp"

namespace tiling::config {

// Run configuration. Text form: "[section]" headers, "key = value" lines,
// '#' comments; complex numbers are written as two reals.
//
//   [shape]      c0 c1 c2 zeta_center rho extension grid
//   [planar]     A B C lambda radius mesh
//   [run]        delta seed samples batches bootstrap threads output
//   [knobs]      NM eps_short project u_radius width_factor cut_seed
//   [tolerances] free keys, passed to StatsConfig
struct RunConfig {
  shape::TestShapeParams shape;
  int grid = 129;

  planar::PlanarParams planar;
  double planar_radius = 8;
  double planar_mesh = 1;

  double delta = 1.0 / 32;
  uint64_t seed = 1;
  int samples = 10000;
  int batches = 50;
  int bootstrap = 400;
  int threads = 1;
  std::string output = "out";

  int NM = 1;
  double eps_short = -1;  // <= 0: automatic
  bool project = true;
  double u_radius = 0.7;
  double width_factor = 0.7;
  uint64_t cut_seed = 11;

  std::map<std::string, double> tolerances = stats::StatsConfig{}.tolerances;

  bool operator==(const RunConfig&) const;

  // BadConfig naming the offending key.
  void validate() const;
  stats::StatsConfig stats() const;
  shape::PipelineOptions pipeline_options() const;
};

// Parse errors are BadConfig with the line number; unknown keys are rejected.
RunConfig parse(const std::string& text);
std::string to_text(const RunConfig& c);
RunConfig load(const std::string& path);

// FNV-1a of to_text(c), as 16 hex digits.
std::string config_hash(const RunConfig& c);

}  // namespace tiling::config

#include "tiling/io.hpp"

#include <fstream>
#include <sstream>

namespace tiling::io {

json hexcoord_to_json(const hex::HexCoord& c) { return json::array({c.m, c.n}); }

hex::HexCoord hexcoord_from_json(const json& j, hex::Role role) {
  return {j.at(0).get<int64_t>(), j.at(1).get<int64_t>(), role};
}

json tgraph_to_json(const TGraph& g, const json& meta) {
  json j;
  j["schema"] = "tg-1";
  json pts = json::array();
  for (auto p : g.points) pts.push_back({p.real(), p.imag()});
  j["points"] = pts;
  json bd = json::array();
  for (int v = 0; v < g.num_vertices(); ++v)
    if (g.boundary[v]) bd.push_back(v);
  j["boundary"] = bd;
  json segs = json::array();
  for (int s = 0; s < g.num_segments(); ++s) {
    const auto& sv = g.segments[s];
    json e;
    e["ends"] = {sv.front(), sv.back()};
    e["interior"] = std::vector<int>(sv.begin() + 1, sv.end() - 1);
    if (s < static_cast<int>(g.segment_label.size()) && g.segment_label[s]) e["label"] = hexcoord_to_json(*g.segment_label[s]);
    segs.push_back(e);
  }
  j["segments"] = segs;
  if (!g.piece_short.empty()) j["piece_short"] = std::vector<int>(g.piece_short.begin(), g.piece_short.end());
  if (!g.degenerate_geometry.empty()) {
    json dg = json::array();
    for (const auto& d : g.degenerate_geometry)
      dg.push_back({{"vertex", d.vertex}, {"seg", d.seg}, {"l", d.l}});
    j["degenerate"] = dg;
  }
  json vl = json::object();
  for (int v = 0; v < static_cast<int>(g.vertex_label.size()); ++v)
    if (g.vertex_label[v]) vl[std::to_string(v)] = hexcoord_to_json(*g.vertex_label[v]);
  if (!vl.empty()) j["vertex_labels"] = vl;
  j["eps_geom"] = g.eps_geom;
  j["meta"] = meta;
  return j;
}

TGraph tgraph_from_json(const json& j) {
  if (j.value("schema", std::string()) != "tg-1") throw Error("Schema", "expected tg-1 graph");
  TGraph g;
  for (const auto& p : j.at("points")) g.points.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  g.boundary.assign(g.points.size(), 0);
  for (const auto& v : j.at("boundary")) g.boundary.at(v.get<int>()) = 1;
  for (const auto& e : j.at("segments")) {
    std::vector<int> sv{e.at("ends").at(0).get<int>()};
    for (const auto& v : e.value("interior", json::array())) sv.push_back(v.get<int>());
    sv.push_back(e.at("ends").at(1).get<int>());
    for (int v : sv)
      if (v < 0 || v >= g.num_vertices()) throw Error("Schema", "vertex id out of range");
    g.segments.push_back(sv);
    if (e.contains("label"))
      g.segment_label.push_back(hexcoord_from_json(e["label"], hex::Role::Black));
    else
      g.segment_label.emplace_back();
  }
  g.eps_geom = j.value("eps_geom", 1e-9 * std::max(1.0, g.diameter()));
  g.finalize();
  if (j.contains("piece_short")) {
    auto ps = j["piece_short"].get<std::vector<int>>();
    if (static_cast<int>(ps.size()) != g.num_pieces()) throw Error("Schema", "piece_short length mismatch");
    g.piece_short.assign(ps.begin(), ps.end());
  }
  if (j.contains("degenerate"))
    for (const auto& d : j["degenerate"])
      g.degenerate_geometry.push_back(
          {d.at("vertex").get<int>(), d.at("seg").get<std::array<int, 3>>(), d.at("l").get<std::array<double, 3>>()});
  if (j.contains("vertex_labels"))
    for (auto& [k, v] : j["vertex_labels"].items()) g.vertex_label.at(std::stoi(k)) = hexcoord_from_json(v, hex::Role::Dual);
  return g;
}

json dimer_to_json(const DimerGraph& d) {
  json j;
  j["schema"] = "tg-1-dimer";
  j["num_blacks"] = d.num_blacks;
  j["num_face_whites"] = d.num_face_whites;
  j["num_boundary_whites"] = d.num_boundary_whites;
  json bp = json::array();
  for (auto [a, b] : d.boundary_pairs) bp.push_back({a, b});
  j["boundary_pairs"] = bp;
  json w = json::array();
  for (const auto& e : d.entries) w.push_back({e.black, e.white, e.weight});
  j["weights"] = w;
  return j;
}

json region_to_json(const HexSubgraph& g) {
  json w = json::array(), b = json::array();
  for (auto& c : g.whites) w.push_back(hexcoord_to_json(c));
  for (auto& c : g.blacks) b.push_back(hexcoord_to_json(c));
  return {{"whites", w}, {"blacks", b}};
}

HexSubgraph region_from_json(const json& j) {
  if (!j.contains("whites") || !j.contains("blacks")) throw Error("Schema", "region needs whites and blacks");
  std::vector<hex::HexCoord> w, b;
  for (auto& c : j.at("whites")) w.push_back(hexcoord_from_json(c, hex::Role::White));
  for (auto& c : j.at("blacks")) b.push_back(hexcoord_from_json(c, hex::Role::Black));
  return HexSubgraph::from_coords(w, b);
}

std::string matchings_header(const HexSubgraph& g, const json& meta) {
  json j = region_to_json(g);
  j["schema"] = "matchings-1";
  j["meta"] = meta;
  return j.dump() + "\n";
}

std::string matching_line(uint64_t index, const HexMatching& m) {
  return json{{"index", index}, {"match", m}}.dump() + "\n";
}

MatchingsFile read_matchings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("Io", "cannot read " + path);
  std::string line;
  MatchingsFile out;
  try {
    if (!std::getline(in, line)) throw Error("Schema", "empty matchings file");
    const json head = json::parse(line);
    if (head.value("schema", std::string()) != "matchings-1") throw Error("Schema", "expected matchings-1");
    out.region = region_from_json(head);
    out.meta = head.value("meta", json::object());
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const json j = json::parse(line);
      out.index.push_back(j.at("index").get<uint64_t>());
      out.matchings.push_back(j.at("match").get<HexMatching>());
    }
  } catch (const json::exception& e) {
    throw Error("Schema", e.what());
  }
  return out;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("Io", "cannot open " + path);
  return json::parse(in);
}

void write_json_file(const std::string& path, const json& j) { write_text_file(path, j.dump(1) + "\n"); }

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("Io", "cannot write " + path);
  out << text;
}

}  // namespace tiling::io

#pragma once

#include <string>

#include "json.hpp"
#include "tiling/hexgraph.hpp"
#include "tiling/tgraph.hpp"

namespace tiling::io {

using json = nlohmann::json;

// tg-1 schema:
//   {"schema":"tg-1","points":[[x,y],...],"boundary":[ids],
//    "segments":[{"ends":[i,j],"interior":[ids in order],"label":[m,n]?}],
//    "piece_short":[0/1...]?, "degenerate":[{"vertex":v,"seg":[..],"l":[..]}]?, "meta":{...}}
json tgraph_to_json(const TGraph& g, const json& meta = json::object());
TGraph tgraph_from_json(const json& j);

json dimer_to_json(const DimerGraph& d);

json hexcoord_to_json(const hex::HexCoord& c);
hex::HexCoord hexcoord_from_json(const json& j, hex::Role role);

// Region: {"whites":[[m,n],...],"blacks":[[m,n],...]}; index order is kept.
json region_to_json(const HexSubgraph& g);
HexSubgraph region_from_json(const json& j);

// matchings.jsonl: a header line {"schema":"matchings-1", region fields, "meta":{...}}
// followed by one {"index":i,"match":[black index per white]} line per sample.
std::string matchings_header(const HexSubgraph& g, const json& meta = json::object());
std::string matching_line(uint64_t index, const HexMatching& m);
struct MatchingsFile {
  HexSubgraph region;
  json meta;
  std::vector<uint64_t> index;
  std::vector<HexMatching> matchings;
};
// Throws Schema on a malformed file.
MatchingsFile read_matchings(const std::string& path);

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace tiling::io

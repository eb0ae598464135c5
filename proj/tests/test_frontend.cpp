#include <gtest/gtest.h>

#include <filesystem>

#include "tiling/config.hpp"
#include "tiling/io.hpp"
#include "tiling/oracle.hpp"
#include "tiling/render.hpp"
#include "tiling/verify.hpp"

using namespace tiling;

TEST(Render, SmallHexagonHasTwoDistinctPictures) {
  const HexSubgraph g = hexagon_region(1, 1, 1);
  std::vector<HexMatching> ms;
  oracle::enumerate_matchings(g, [&](const HexMatching& m) { ms.push_back(m); });
  ASSERT_EQ(ms.size(), 2u);
  const std::string a = render::render_tiling(g, ms[0]), b = render::render_tiling(g, ms[1]);
  EXPECT_NE(a, b);
  EXPECT_EQ(a, render::render_tiling(g, ms[0]));
  for (const std::string* s : {&a, &b}) {
    EXPECT_EQ(s->rfind("<svg", 0), 0u);
    size_t polygons = 0;
    for (size_t p = s->find("<polygon"); p != std::string::npos; p = s->find("<polygon", p + 1)) ++polygons;
    EXPECT_EQ(polygons, 3u);
  }
  // one lozenge of each orientation in both tilings
  render::Style st;
  for (const auto& m : ms) {
    const std::string s = render::render_tiling(g, m, st);
    for (const auto& f : st.fill) EXPECT_NE(s.find(f), std::string::npos);
  }
}

TEST(Render, HeightsOverlay) {
  const HexSubgraph g = hexagon_region(2, 2, 2);
  std::mt19937_64 rng(3);
  const HexMatching m = some_matching(g, rng);
  render::Style st;
  st.heights = true;
  const std::string s = render::render_tiling(g, m, st);
  EXPECT_NE(s.find("<text"), std::string::npos);
  EXPECT_EQ(s, render::render_tiling(g, m, st));
}

TEST(Render, MalformedMatchingRejected) {
  const HexSubgraph g = hexagon_region(1, 2, 1);
  HexMatching bad(g.whites.size(), 0);
  try {
    render::render_tiling(g, bad);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), "NotPerfect");
  }
  EXPECT_THROW(render::render_tiling(g, HexMatching{}), Error);
}

TEST(Config, RoundTrip) {
  config::RunConfig c;
  EXPECT_EQ(config::parse(config::to_text(c)), c);
  c.shape.c1 = 0.15 * std::polar(1.0, 0.4);
  c.shape.c2 = cplx(0, 0.05);
  c.planar.lambda = std::polar(1.0, 1.0 / 3);
  c.delta = 1.0 / 64;
  c.seed = 18446744073709551557ULL;
  c.project = false;
  c.eps_short = 1e-7;
  c.output = "runs/a b";
  c.tolerances["extra"] = 0.125;
  const config::RunConfig d = config::parse(config::to_text(c));
  EXPECT_EQ(d, c);
  EXPECT_EQ(config::to_text(d), config::to_text(c));
  EXPECT_EQ(config::config_hash(d), config::config_hash(c));
  EXPECT_NE(config::config_hash(d), config::config_hash(config::RunConfig{}));
  EXPECT_NO_THROW(d.validate());
}

TEST(Config, ParseErrors) {
  const auto kind = [](const std::string& text) {
    try {
      config::parse(text);
    } catch (const Error& e) {
      return e.kind();
    }
    return std::string("none");
  };
  EXPECT_EQ(kind("# comment only\n\n[run]\ndelta = 0.05  # trailing\n"), "none");
  EXPECT_EQ(kind("delta = 0.1\n"), "BadConfig");
  EXPECT_EQ(kind("[nowhere]\n"), "BadConfig");
  EXPECT_EQ(kind("[run]\nspeed = 3\n"), "BadConfig");
  EXPECT_EQ(kind("[run]\ndelta = 0.1x\n"), "BadConfig");
  EXPECT_EQ(kind("[shape]\nc1 = 0.1\n"), "BadConfig");
  EXPECT_EQ(kind("[run]\nsamples = 2.5\n"), "BadConfig");
  EXPECT_EQ(kind("[knobs]\nproject = maybe\n"), "BadConfig");
  EXPECT_EQ(kind("[run\n"), "BadConfig");
  EXPECT_EQ(config::parse("[run]\ndelta = 0.05\n").delta, 0.05);
}

TEST(Config, Validation) {
  auto invalid = [](auto edit) {
    config::RunConfig c;
    edit(c);
    EXPECT_THROW(c.validate(), Error);
  };
  invalid([](config::RunConfig& c) { c.delta = 0; });
  invalid([](config::RunConfig& c) { c.NM = 2; });
  invalid([](config::RunConfig& c) { c.u_radius = 1; });
  invalid([](config::RunConfig& c) { c.eps_short = 0.5; });
  invalid([](config::RunConfig& c) { c.threads = 0; });
  invalid([](config::RunConfig& c) { c.samples = 100; });  // fewer than 20 per batch
  invalid([](config::RunConfig& c) { c.planar.C = c.planar.B; });
  invalid([](config::RunConfig& c) { c.shape.extension = 1; });
  EXPECT_NO_THROW(config::RunConfig{}.validate());
}

TEST(Io, MatchingsFileRoundTrip) {
  const HexSubgraph g = hexagon_region(2, 1, 2);
  std::vector<HexMatching> ms;
  oracle::enumerate_matchings(g, [&](const HexMatching& m) { ms.push_back(m); });
  const auto path = std::filesystem::temp_directory_path() / "tiling_matchings_test.jsonl";
  std::string text = io::matchings_header(g, {{"domain", "test"}});
  for (size_t i = 0; i < ms.size(); ++i) text += io::matching_line(10 + i, ms[i]);
  io::write_text_file(path.string(), text);
  const io::MatchingsFile f = io::read_matchings(path.string());
  EXPECT_EQ(f.region.whites, g.whites);
  EXPECT_EQ(f.region.blacks, g.blacks);
  EXPECT_EQ(f.matchings, ms);
  EXPECT_EQ(f.index.front(), 10u);
  EXPECT_EQ(f.meta.at("domain"), "test");
  io::write_text_file(path.string(), "{\"schema\":\"other\"}\n");
  EXPECT_THROW(io::read_matchings(path.string()), Error);
  io::write_text_file(path.string(), text + "{not json\n");
  EXPECT_THROW(io::read_matchings(path.string()), Error);
  std::filesystem::remove(path);
}

TEST(Verify, SuiteSelectionAndBudget) {
  verify::VerifyOptions opt;
  EXPECT_THROW(verify::run_suite("bogus", opt), Error);
  opt.budget_minutes = -1;  // everything starts after the budget
  const auto r = verify::run_suite("curved", opt);
  ASSERT_EQ(r.size(), 4u);
  EXPECT_EQ(r.front().id, 5);
  for (const auto& x : r) {
    EXPECT_TRUE(x.skipped);
    EXPECT_NE(verify::format_line(x).find("SKIP"), std::string::npos);
  }
}

TEST(Verify, OracleCriterionPasses) {
  const auto r = verify::oracle_exactness({});
  EXPECT_TRUE(r.pass) << r.detail;
  EXPECT_EQ(verify::format_line(r).rfind("criterion 1 oracle-exactness: PASS", 0), 0u);
}

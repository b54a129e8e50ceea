#include "fixtures.hpp"
#include "stit/config.hpp"
#include "stit/io.hpp"

#include <doctest.h>

#include <regex>
#include <sstream>

using namespace stit;

namespace {

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto at = text.find(needle); at != std::string::npos; at = text.find(needle, at + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("tessellation JSON round trip") {
  for (int d : {2, 3}) {
    const auto tess = simulate_stit(testing::unit_box(d), DirectionalDistribution::isotropic(d), 4.0, {3, 1});
    const Json j = to_json(tess);
    const auto back = tessellation_from_json(Json::parse(j.dump()));
    CHECK(to_json(back).dump() == j.dump());
    CHECK(back.events.size() == tess.events.size());
    CHECK(back.cells.size() == tess.cells.size());
    CHECK(back.window.volume() == doctest::Approx(1.0));
  }
  const auto pht = simulate_pht(testing::unit_box(2), DirectionalDistribution::axis_aligned(2), 3.0, {3, 2});
  CHECK(tessellation_from_json(to_json(pht)).kind == TessellationKind::pht);
}

TEST_CASE("SVG has one chord per event") {
  const auto tess = simulate_stit(testing::unit_box(2), DirectionalDistribution::isotropic(2), 5.0, {1, 0});
  const auto svg = render_svg(tess);
  CHECK(count(svg, "<line ") == tess.events.size());
  CHECK(count(svg, "<polygon class=\"window\"") == 1);
  std::size_t late = 0;
  for (const auto& e : tess.events) late += e.birth_time > 0.75 * tess.horizon;
  CHECK(count(svg, "chord new") == late);

  const auto frames = render_svg(tess, SvgOptions{200.0, -1.0, 3});
  CHECK(count(frames, "<g id=\"frame") == 3);
  std::size_t expected = 0;
  for (int f = 1; f <= 3; ++f)
    for (const auto& e : tess.events) expected += e.birth_time <= tess.horizon * f / 3;
  CHECK(count(frames, "<line ") == expected);

  const auto cube = simulate_stit(testing::unit_box(3), DirectionalDistribution::isotropic(3), 2.0, {1, 0});
  CHECK_THROWS(render_svg(cube));
}

TEST_CASE("segment CSV") {
  const auto tess = simulate_stit(testing::unit_box(3), DirectionalDistribution::axis_aligned(3), 4.0, {2, 0});
  const auto segs = maximal_segments(tess);
  std::ostringstream os;
  write_segments_csv(os, segs, 3);
  const std::string text = os.str();
  CHECK(text.rfind("length,dir_x,dir_y,dir_z,birth_1,birth_2,internal_vertices,touches_boundary\n", 0) == 0);
  CHECK(count(text, "\n") == segs.size() + 1);
}

TEST_CASE("reports serialize") {
  EstimateReport r;
  r.statistic = "p";
  r.estimate = 0.5;
  r.ci_low = 0.4;
  r.ci_high = 0.6;
  const Json j = to_json(r);
  CHECK(j["ci95"][0] == 0.4);
  GofReport g{"KS", 0.1, 0.5, "grid", 100.0, 1.0};
  CHECK(to_json(g)["p_value"] == 0.5);
}

TEST_CASE("run configuration") {
  RunConfig cfg;
  CHECK_NOTHROW(cfg.validate(true));
  CHECK(cfg.window_polytope().volume() == doctest::Approx(1.0));
  CHECK(cfg.to_json()["version"] == kVersion);

  cfg.window = {2.0, 3.0};
  CHECK(cfg.window_polytope().volume() == doctest::Approx(6.0));

  RunConfig bad;
  bad.d = 4;
  CHECK_THROWS_AS(bad.validate(true), ConfigError);
  CHECK_NOTHROW(bad.validate(false));
  bad = RunConfig{};
  bad.t = 0.0;
  CHECK_THROWS_AS(bad.validate(false), ConfigError);
  bad = RunConfig{};
  bad.replicates = 0;
  CHECK_THROWS_AS(bad.validate(false), ConfigError);
  bad = RunConfig{};
  bad.q = "discrete:[((1,0),1.0)]";
  CHECK_THROWS_AS(bad.validate(true), ConfigError);
  bad = RunConfig{};
  bad.format = "xml";
  CHECK_THROWS_AS(bad.validate(false), ConfigError);
  bad = RunConfig{};
  bad.window = {1.0, 2.0, 3.0};
  CHECK_THROWS_AS(bad.validate(true), ConfigError);
}

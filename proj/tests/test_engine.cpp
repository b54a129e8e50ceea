#include "fixtures.hpp"
#include "stit/engine.hpp"
#include "stit/io.hpp"
#include "stit/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace stit;
using testing::unit_box;

namespace {

void check_tiling(const Tessellation& tess) {
  double total = 0.0;
  for (const auto& c : tess.cells) total += c.volume();
  CHECK(std::abs(total - tess.window.volume()) <= 1e-8 * tess.window.volume());

  std::set<std::int64_t> ids;
  for (std::size_t i = 0; i < tess.events.size(); ++i) {
    ids.insert(tess.events[i].id);
    CHECK(tess.events[i].birth_time > 0.0);
    CHECK(tess.events[i].birth_time <= tess.horizon);
    if (i > 0) CHECK(tess.events[i].birth_time > tess.events[i - 1].birth_time);
  }
  CHECK(ids.size() == tess.events.size());
  for (const auto& c : tess.cells)
    for (const auto& f : c.facets())
      if (f.tag.is_split()) CHECK(ids.count(f.tag.event_id()) == 1);
  CHECK(tess.cells.size() == tess.events.size() + 1);
  CHECK(tess.cell_keys.size() == tess.cells.size());
}

std::vector<double> cell_counts(std::span<const Tessellation> ts) {
  std::vector<double> out;
  for (const auto& t : ts) out.push_back(static_cast<double>(t.cells.size()));
  return out;
}

}  // namespace

TEST_CASE("no split before t = 0.1 with probability exp(-0.1)") {
  const auto W = unit_box(2);
  const auto q = DirectionalDistribution::axis_aligned(2);
  const int runs = 100000;
  const auto empty = parallel_map(runs, 1, [&](std::size_t i) {
    return simulate_stit(W, q, 0.1, {21, i}).events.empty() ? 1.0 : 0.0;
  });
  double hits = 0.0;
  for (double e : empty) hits += e;
  const double p = std::exp(-0.1);
  CHECK(std::abs(hits / runs - p) <= 3.0 * std::sqrt(p * (1.0 - p) / runs));
}

TEST_CASE("tiny horizon leaves the window whole") {
  for (int d : {2, 3}) {
    const auto tess = simulate_stit(unit_box(d), DirectionalDistribution::isotropic(d), 1e-15, {1, 0});
    CHECK(tess.cells.size() == 1);
    CHECK(tess.events.empty());
    CHECK(tess.cells[0].volume() == doctest::Approx(1.0));
    const auto pht = simulate_pht(unit_box(d), DirectionalDistribution::isotropic(d), 1e-15, {1, 0});
    CHECK(pht.cells.size() == 1);
  }
}

TEST_CASE("same seed gives identical event logs") {
  for (int d : {2, 3}) {
    const auto W = unit_box(d);
    const auto q = DirectionalDistribution::isotropic(d);
    const auto a = simulate_stit(W, q, 5.0, {9, 3});
    const auto b = simulate_stit(W, q, 5.0, {9, 3});
    CHECK(to_json(a).dump() == to_json(b).dump());
    const auto c = simulate_stit(W, q, 5.0, {9, 4});
    CHECK(to_json(a).dump() != to_json(c).dump());
  }
}

TEST_CASE("tessellation invariants") {
  for (int d : {2, 3})
    for (const char* q : {"isotropic", "axis"})
      for (std::uint64_t r = 0; r < 5; ++r) {
        CAPTURE(d);
        CAPTURE(q);
        const auto tess = simulate_stit(unit_box(d), DirectionalDistribution::parse(q, d), d == 2 ? 15.0 : 5.0, {2, r});
        check_tiling(tess);
        // each event's face lies in the window
        for (const auto& e : tess.events)
          for (const Vec& v : e.face.vertices) CHECK(tess.window.contains(v, 1e-9));
      }
}

TEST_CASE("splits within a lineage happen at increasing times") {
  const auto tess = simulate_stit(unit_box(2), DirectionalDistribution::isotropic(2), 12.0, {4, 0});
  // the face of an event lies on the facets of earlier events only
  for (const auto& e : tess.events)
    for (const FacetTag tag : e.face.boundary_tags)
      if (tag.is_split()) CHECK(tess.event(tag.event_id()).birth_time < e.birth_time);
}

TEST_CASE("expected event count grows with t") {
  const auto W = unit_box(2);
  const auto q = DirectionalDistribution::isotropic(2);
  double previous = -1.0;
  for (double t : {1.0, 2.0, 4.0, 8.0}) {
    const auto n = parallel_map(400, 1, [&](std::size_t i) {
      return static_cast<double>(simulate_stit(W, q, t, {31, i}).events.size());
    });
    const auto m = mean_estimate(n, "events");
    CHECK(m.estimate >= previous);
    previous = m.estimate;
  }
}

TEST_CASE("Poisson hyperplane counts") {
  const auto W = unit_box(2);
  const auto q = DirectionalDistribution::axis_aligned(2);
  const auto counts = parallel_map(100000, 1, [&](std::size_t i) {
    return static_cast<double>(simulate_pht(W, q, 2.0, {41, i}).events.size());
  });
  const auto m = mean_estimate(counts, "lines");
  CHECK(std::abs(m.estimate - 2.0) <= 3.0 * m.std_error);
  const auto disp = poisson_dispersion(counts);
  CHECK(disp.statistic >= 0.97);
  CHECK(disp.statistic <= 1.03);

  const auto pht = simulate_pht(W, q, 3.0, {41, 7});
  double total = 0.0;
  for (const auto& c : pht.cells) total += c.volume();
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
  for (const auto& e : pht.events) CHECK(e.birth_time == 3.0);
}

TEST_CASE("PHT with doubled intensity on a halved window") {
  const auto q = DirectionalDistribution::isotropic(2);
  const auto W = unit_box(2);
  const auto half = ConvexPolytope::box(std::vector<double>{0.5, 0.5});
  const auto a = parallel_map(10000, 1, [&](std::size_t i) { return (double)simulate_pht(W, q, 3.0, {51, i}).cells.size(); });
  const auto b = parallel_map(10000, 1, [&](std::size_t i) { return (double)simulate_pht(half, q, 6.0, {52, i}).cells.size(); });
  const auto ma = mean_estimate(a, "cells"), mb = mean_estimate(b, "cells");
  CHECK(std::abs(ma.estimate - mb.estimate) <= 3.0 * std::hypot(ma.std_error, mb.std_error));
}

TEST_CASE("iteration nests a STIT in every outer cell") {
  const auto W = unit_box(2);
  const auto q = DirectionalDistribution::isotropic(2);
  for (std::uint64_t r = 0; r < 10; ++r) {
    const auto it = iterate(W, q, 2.0, 3.0, {61, r});
    CHECK(it.kind == TessellationKind::iterated);
    CHECK(it.horizon == doctest::Approx(5.0));
    check_tiling(it);
    // every outer cell is tiled by the final cells lying inside it
    std::size_t outer_events = 0;
    for (const auto& e : it.events) outer_events += e.birth_time <= 2.0;
    std::vector<ConvexPolytope> outer{W};
    for (const auto& e : it.events) {
      if (e.birth_time > 2.0) break;
      for (std::size_t k = 0; k < outer.size(); ++k)
        if (splits(outer[k], e.plane) && outer[k].contains(0.5 * (e.face.vertices[0] + e.face.vertices[1]), 1e-9)) {
          auto cut = clip(outer[k], e.plane);
          outer[k] = cut.negative;
          outer.push_back(cut.positive);
          break;
        }
    }
    CHECK(outer.size() == outer_events + 1);
    std::size_t inner_total = 0;
    for (const auto& o : outer) {
      std::size_t inner = 0;
      for (const auto& c : it.cells) inner += o.contains(c.centroid(), 1e-9);
      CHECK(inner >= 1);
      inner_total += inner;
    }
    CHECK(inner_total == it.cells.size());
  }
}

TEST_CASE("iteration with a vanishing stage reduces to one STIT") {
  const auto W = unit_box(2);
  const auto q = DirectionalDistribution::isotropic(2);
  const auto outer_only = iterate(W, q, 4.0, 1e-15, {62, 0});
  for (const auto& e : outer_only.events) CHECK(e.birth_time <= 4.0);
  const auto inner_only = iterate(W, q, 1e-15, 4.0, {62, 1});
  for (const auto& e : inner_only.events) CHECK(e.birth_time > 1e-15);
  check_tiling(outer_only);
  check_tiling(inner_only);
}

TEST_CASE("restarting the construction preserves the cell-count law") {
  const auto W = unit_box(2);
  const auto q = DirectionalDistribution::isotropic(2);
  const std::size_t n = 3000;
  std::vector<Tessellation> restarted, direct;
  for (std::size_t i = 0; i < n; ++i) {
    const auto state = simulate_stit(W, q, 3.0, {71, i});
    restarted.push_back(continue_stit(state, 3.0, StreamKey::root(72, i)));
    direct.push_back(simulate_stit(W, q, 6.0, {73, i}));
  }
  check_tiling(restarted.front());
  CHECK(restarted.front().horizon == doctest::Approx(6.0));
  const auto a = cell_counts(restarted), b = cell_counts(direct);
  CHECK(gof_ks_two_sample(a, b).p_value > 0.01);
}

TEST_CASE("rescaling") {
  const auto tess = simulate_stit(unit_box(3), DirectionalDistribution::axis_aligned(3), 4.0, {81, 0});
  const auto same = rescale(tess, 1.0);
  CHECK(to_json(same).dump() == to_json(tess).dump());
  const auto big = rescale(tess, 2.0);
  REQUIRE(big.cells.size() == tess.cells.size());
  for (std::size_t i = 0; i < tess.cells.size(); ++i)
    CHECK(big.cells[i].volume() == doctest::Approx(8.0 * tess.cells[i].volume()));
  CHECK(big.window.volume() == doctest::Approx(8.0));
  for (std::size_t i = 0; i < tess.events.size(); ++i) {
    CHECK(big.events[i].birth_time == tess.events[i].birth_time);
    CHECK(big.events[i].face.content() == doctest::Approx(4.0 * tess.events[i].face.content()));
  }
}

TEST_CASE("lower-level entry numbers events from the given id and time") {
  const auto tess = simulate_stit_from(unit_box(2), DirectionalDistribution::isotropic(2), 2.0, 5.0,
                                       StreamKey::root(91, 0), 100);
  REQUIRE_FALSE(tess.events.empty());
  CHECK(tess.events.front().id >= 100);
  for (const auto& e : tess.events) {
    CHECK(e.birth_time > 2.0);
    CHECK(e.birth_time <= 7.0);
  }
}

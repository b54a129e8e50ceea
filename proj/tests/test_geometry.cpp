#include "fixtures.hpp"
#include "stit/geometry.hpp"
#include "stit/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>

using namespace stit;
using testing::unit_box;
using testing::vec;

namespace {

Hyperplane plane(const Vec& n, double offset, std::int64_t id = 0) {
  Hyperplane h;
  h.normal = n.normalized();
  h.offset = offset / n.norm();
  h.id = id;
  return h;
}

}  // namespace

TEST_CASE("unit square split at x = 1/2") {
  const auto sq = unit_box(2);
  CHECK(sq.volume() == doctest::Approx(1.0));
  const auto r = clip(sq, plane(vec(1, 0), 0.5));
  CHECK(r.positive.volume() == doctest::Approx(0.5));
  CHECK(r.negative.volume() == doctest::Approx(0.5));
  CHECK(r.face.content() == doctest::Approx(1.0));
  for (const Vec& v : r.face.vertices) CHECK(v.x() == doctest::Approx(0.5));
  const auto [lo, hi] = r.positive.bounds();
  CHECK(lo.x() == doctest::Approx(0.5));
  CHECK(hi.x() == doctest::Approx(1.0));
  CHECK(hi.y() - lo.y() == doctest::Approx(1.0));
}

TEST_CASE("cube cut through its centre perpendicular to the diagonal is a regular hexagon") {
  const auto cube = unit_box(3);
  const auto r = clip(cube, plane(vec(1, 1, 1), 1.5));
  REQUIRE(r.face.vertices.size() == 6);
  // oracle: the six points with coordinates a permutation of (0, 1/2, 1)
  for (const Vec& v : r.face.vertices) {
    CHECK(v.sum() == doctest::Approx(1.5));
    std::vector<double> c{v.x(), v.y(), v.z()};
    std::sort(c.begin(), c.end());
    CHECK(c[0] == doctest::Approx(0.0));
    CHECK(c[1] == doctest::Approx(0.5));
    CHECK(c[2] == doctest::Approx(1.0));
  }
  for (std::size_t i = 0; i < 6; ++i)
    CHECK((r.face.vertices[i] - r.face.vertices[(i + 1) % 6]).norm() == doctest::Approx(std::sqrt(0.5)));
  CHECK(r.face.content() == doctest::Approx(3.0 * std::sqrt(3.0) / 4.0));
  CHECK(r.positive.volume() + r.negative.volume() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("corner simplex of the cube has volume 1/6") {
  const auto r = clip(unit_box(3), plane(vec(1, 1, 1), 1.0));
  CHECK(r.negative.volume() == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(r.negative.vertices().size() == 4);
}

TEST_CASE("cube edges and their tags") {
  const auto cube = unit_box(3);
  const auto edges = edges_with_tags(cube);
  CHECK(edges.size() == 12);
  for (const auto& e : edges) {
    REQUIRE(e.tags.size() == 2);
    CHECK(e.tags[0].is_window());
    CHECK(e.tags[1].is_window());
    CHECK((e.b - e.a).norm() == doctest::Approx(1.0));
  }

  const auto r = clip(cube, plane(vec(1, 0, 0), 0.3, 7));
  for (const ConvexPolytope* part : {&r.positive, &r.negative}) {
    const auto es = edges_with_tags(*part);
    CHECK(es.size() >= edges.size());
    int mixed = 0;
    for (const auto& e : es) {
      const bool has_split = e.tags[0].is_split() || e.tags[1].is_split();
      const bool has_window = e.tags[0].is_window() || e.tags[1].is_window();
      if (has_split) {
        CHECK(has_window);
        ++mixed;
        CHECK(std::abs(e.a.x() - 0.3) < 1e-12);
        CHECK(std::abs(e.b.x() - 0.3) < 1e-12);
      }
    }
    CHECK(mixed == 4);
  }
}

TEST_CASE("volume and diameter") {
  CHECK(volume(unit_box(2)) == doctest::Approx(1.0));
  CHECK(diameter(unit_box(2)) == doctest::Approx(std::sqrt(2.0)));
  CHECK(diameter(unit_box(3)) == doctest::Approx(std::sqrt(3.0)));
  const auto box = ConvexPolytope::box(std::vector<double>{2.0, 3.0, 0.5});
  CHECK(box.volume() == doctest::Approx(3.0));
  CHECK(box.scaled(2.0).volume() == doctest::Approx(24.0));
  CHECK(box.is_axis_box());
}

TEST_CASE("widths") {
  const auto sq = unit_box(2);
  CHECK(width(sq, vec(1, 0)) == doctest::Approx(1.0));
  CHECK(width(sq, vec(1, 1).normalized()) == doctest::Approx(std::sqrt(2.0)));
  Stream rng(StreamKey::root(3, 0));
  for (int i = 0; i < 50; ++i) {
    const double a = rng.uniform() * 2.0 * std::numbers::pi;
    const Vec n = vec(std::cos(a), std::sin(a));
    CHECK(width(sq, n) == doctest::Approx(width(sq, -n)));
  }
}

TEST_CASE("non-splitting hyperplane is rejected") {
  const auto sq = unit_box(2);
  CHECK_FALSE(splits(sq, plane(vec(1, 0), 1.5)));
  CHECK_THROWS_AS(clip(sq, plane(vec(1, 0), 1.5)), GeometryError);
  CHECK(splits(sq, plane(vec(1, 0), 0.5)));
}

namespace {

// Random hyperplane through a uniform point of c with uniform direction.
Hyperplane random_plane(const ConvexPolytope& c, Stream& rng, std::int64_t id) {
  const auto [lo, hi] = c.bounds();
  Vec p = Vec::Zero(), n = Vec::Zero();
  for (int k = 0; k < c.dim(); ++k) {
    p[k] = lo[k] + rng.uniform() * (hi[k] - lo[k]);
    n[k] = rng.normal();
  }
  n.normalize();
  Hyperplane h;
  h.normal = n;
  h.offset = n.dot(p);
  h.id = id;
  return h;
}

}  // namespace

TEST_CASE("repeated clipping conserves volume and respects containment") {
  for (int d : {2, 3}) {
    CAPTURE(d);
    Stream rng(StreamKey::root(11, static_cast<std::uint64_t>(d)));
    std::vector<ConvexPolytope> cells{unit_box(d)};
    int made = 0;
    for (int trial = 0; made < 40 && trial < 1000; ++trial) {
      const std::size_t i = static_cast<std::size_t>(rng.uniform() * cells.size());
      const Hyperplane h = random_plane(cells[i], rng, made);
      if (!splits(cells[i], h)) continue;
      const auto r = clip(cells[i], h);
      const double tol = 1e-9 * cells[i].diameter();
      for (const Vec& v : r.positive.vertices()) {
        CHECK(cells[i].contains(v, tol));
        CHECK(h.signed_distance(v) >= -tol);
      }
      for (const Vec& v : r.negative.vertices()) CHECK(h.signed_distance(v) <= tol);
      CHECK(r.positive.volume() + r.negative.volume() == doctest::Approx(cells[i].volume()).epsilon(1e-9));
      cells[i] = r.negative;
      cells.push_back(r.positive);
      ++made;
    }
    double total = 0.0;
    for (const auto& c : cells) total += c.volume();
    CHECK(std::abs(total - 1.0) < 1e-8);

    // every split tag appears on both sides of its hyperplane
    std::map<std::int64_t, Vec> first_normal;
    std::map<std::int64_t, std::pair<bool, bool>> sides;
    for (const auto& c : cells)
      for (const auto& f : c.facets()) {
        if (f.tag.is_window()) continue;
        const auto id = f.tag.event_id();
        const Vec& n0 = first_normal.try_emplace(id, f.normal).first->second;
        (n0.dot(f.normal) > 0.0 ? sides[id].first : sides[id].second) = true;
      }
    CHECK(sides.size() == static_cast<std::size_t>(made));
    for (const auto& [id, s] : sides) {
      CAPTURE(id);
      CHECK(s.first);
      CHECK(s.second);
    }
    for (const auto& c : cells)
      for (const auto& f : c.facets())
        for (const Vec& v : c.vertices()) CHECK(f.normal.dot(v) <= f.offset + 1e-9);
  }
}

TEST_CASE("polygon helpers") {
  const std::vector<Vec> sq{vec(0, 0), vec(1, 0), vec(1, 1), vec(0, 1)};
  CHECK(polygon_area(sq) == doctest::Approx(1.0));
  const auto half = clip_polygon(sq, vec(1, 0), 0.25);
  CHECK(polygon_area(half) == doctest::Approx(0.25));
  const std::vector<Vec> tilted{vec(0, 0, 0), vec(1, 0, 1), vec(1, 1, 1), vec(0, 1, 0)};
  CHECK(polygon_area(tilted) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("facet tags") {
  CHECK(FacetTag::window().is_window());
  CHECK(FacetTag::split(4).event_id() == 4);
  CHECK_THROWS(FacetTag::window().event_id());
}

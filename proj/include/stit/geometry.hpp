#pragma once

// Convex polytope kernel for d in {2, 3}: vertex list + facet incidence,
// hyperplane clipping with facet provenance tags, and edge enumeration.
//
// Points are stored as Eigen::Vector3d in both dimensions; planar polytopes
// keep z = 0.

#include <Eigen/Core>

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace stit {

using Vec = Eigen::Vector3d;

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Provenance of a facet: either the window boundary or the splitting event
// that created it.
class FacetTag {
 public:
  constexpr FacetTag() = default;
  static constexpr FacetTag window() { return FacetTag(-1); }
  static constexpr FacetTag split(std::int64_t event_id) { return FacetTag(event_id); }

  constexpr bool is_window() const { return value_ < 0; }
  constexpr bool is_split() const { return value_ >= 0; }
  std::int64_t event_id() const;
  constexpr std::int64_t raw() const { return value_; }

  constexpr auto operator<=>(const FacetTag&) const = default;

 private:
  constexpr explicit FacetTag(std::int64_t v) : value_(v) {}
  std::int64_t value_ = -1;
};

std::string to_string(FacetTag tag);

// {x : <x, normal> = offset}.
struct Hyperplane {
  Vec normal = Vec::Zero();
  double offset = 0.0;
  std::int64_t id = -1;
  std::optional<double> birth_time;

  double signed_distance(const Vec& x) const { return normal.dot(x) - offset; }
};

struct Facet {
  Vec normal = Vec::Zero();  // outward unit normal
  double offset = 0.0;       // body lies in {<x, normal> <= offset}
  FacetTag tag;
  std::vector<int> cycle;  // d=2: edge endpoints; d=3: ccw seen from outside
};

// A (d-1)-polytope c ∩ H recorded at a split. For d=2 the two endpoints carry
// the tag of the facet of c they lie on; for d=3 boundary_tags[i] belongs to
// the polygon edge (vertices[i], vertices[i+1]).
struct Face {
  int dim = 0;  // ambient dimension
  std::vector<Vec> vertices;
  std::vector<FacetTag> boundary_tags;

  double content() const;  // length (d=2) or area (d=3)
  Face scaled(double r) const;
};

class ConvexPolytope {
 public:
  ConvexPolytope() = default;
  // Validates the facet structure and computes cached volume and diameter.
  ConvexPolytope(int dim, std::vector<Vec> vertices, std::vector<Facet> facets);

  // Axis-aligned box [lo, hi] with all facets tagged as window boundary.
  static ConvexPolytope box(const Vec& lo, const Vec& hi, int dim);
  static ConvexPolytope box(std::span<const double> sides);

  int dim() const { return dim_; }
  bool empty() const { return vertices_.empty(); }
  const std::vector<Vec>& vertices() const { return vertices_; }
  const std::vector<Facet>& facets() const { return facets_; }
  double volume() const { return volume_; }
  double diameter() const { return diameter_; }

  // Tolerance used for on-plane snapping: 1e-9 * diameter.
  double tolerance() const { return 1e-9 * diameter_; }

  bool contains(const Vec& x, double tol) const;
  Vec centroid() const;
  ConvexPolytope scaled(double r) const;

  // Axis-aligned bounding box; used for box windows and minus-sampling.
  std::pair<Vec, Vec> bounds() const;
  bool is_axis_box() const;

 private:
  int dim_ = 0;
  std::vector<Vec> vertices_;
  std::vector<Facet> facets_;
  double volume_ = 0.0;
  double diameter_ = 0.0;
};

struct ClipResult {
  ConvexPolytope positive;  // {<x, n> >= offset}
  ConvexPolytope negative;  // {<x, n> <= offset}
  Face face;
};

// Splits c by h. The new shared facet is tagged split(h.id) in both parts.
// Throws GeometryError("non-splitting hyperplane") when h misses the interior.
ClipResult clip(const ConvexPolytope& c, const Hyperplane& h);

// True when h has vertices of c strictly on both sides.
bool splits(const ConvexPolytope& c, const Hyperplane& h);

struct TaggedEdge {
  Vec a = Vec::Zero();
  Vec b = Vec::Zero();
  std::vector<FacetTag> tags;  // d=3: the two incident facets; d=2: the facet itself
};

std::vector<TaggedEdge> edges_with_tags(const ConvexPolytope& c);

double volume(const ConvexPolytope& c);
double diameter(const ConvexPolytope& c);

// Width of a point set in direction n: max <x,n> - min <x,n>.
double width(std::span<const Vec> points, const Vec& n);
double width(const ConvexPolytope& c, const Vec& n);

// Area of a planar polygon in 3-space (any orientation).
double polygon_area(std::span<const Vec> cycle);

// Sutherland-Hodgman clip of a planar polygon (in 3-space) against the
// half-space {<x, n> <= offset}.
std::vector<Vec> clip_polygon(std::span<const Vec> polygon, const Vec& n, double offset);

}  // namespace stit

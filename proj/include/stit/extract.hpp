#pragma once

// Maximal polytopes of a tessellation: splitting facets, maximal segments with
// birth times and internal-vertex counts, and the samplers that turn them into
// typical / length-weighted empirical distributions.

#include "stit/engine.hpp"

#include <array>
#include <span>
#include <vector>

namespace stit {

class ExtractError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MaximalFacet {
  Face face;
  std::int64_t id = -1;
  double birth_time = 0.0;
};

struct MaximalSegment {
  Vec a = Vec::Zero();
  Vec b = Vec::Zero();
  double length = 0.0;
  Vec direction = Vec::Zero();      // upper half-sphere
  std::vector<double> birth_times;  // ascending, d-1 entries
  std::vector<std::int64_t> facets; // defining event ids, in birth order
  int internal_vertices = 0;
  std::array<bool, 2> end_on_boundary{false, false};
  bool touches_boundary = false;
};

enum class Weighting { typical = 0, length = 1 };
enum class Statistic { internal_vertices, birth_times, length, last_birth_time };

const char* to_string(Weighting mode);
const char* to_string(Statistic stat);
Weighting parse_weighting(const std::string& text);
Statistic parse_statistic(const std::string& text);

std::vector<MaximalFacet> maximal_facets(const Tessellation& tess);

// d=2: one segment per chord; internal vertices are the chords ending on it.
// d=3: the edge of the later facet's birth polygon that lies on the earlier
// facet; internal vertices are the distinct other facets meeting its relative
// interior, from either side of either defining facet.
std::vector<MaximalSegment> maximal_segments(const Tessellation& tess);

// d=3 census of final-cell edges carrying two split tags, grouped by the
// unordered pair of event ids.
struct SkeletonGroup {
  std::int64_t first = -1;  // smaller id
  std::int64_t second = -1;
  int edges = 0;
  double length = 0.0;
  double max_line_distance = 0.0;  // from the line of the two recorded planes
};
std::vector<SkeletonGroup> skeleton_groups(const Tessellation& tess);

// Box shrunk by margin * side on each side.
std::pair<Vec, Vec> shrunken_box(const ConvexPolytope& window, double margin);

// Segments lying entirely in the shrunken window and not touching ∂W.
std::vector<MaximalSegment> minus_sample(std::span<const MaximalSegment> segments, const ConvexPolytope& window,
                                         double margin);

// Segments whose lexicographically smallest endpoint is a true endpoint (not
// on ∂W) inside the shrunken window: an unbiased typical sample for any
// statistic that truncation by ∂W leaves intact (birth times, direction).
std::vector<MaximalSegment> reference_point_sample(std::span<const MaximalSegment> segments,
                                                   const ConvexPolytope& window, double margin);

// Segments crossing the hyperplane {x_axis = level}. Such a sample is
// weighted by length times |cos| to the plane normal.
std::vector<MaximalSegment> crossing_sample(std::span<const MaximalSegment> segments, int axis, double level);

double weight_of(const MaximalSegment& s, Weighting mode);

struct WeightedSample {
  int width = 1;               // values per item
  std::vector<double> values;  // row-major, size = width * size()
  std::vector<double> weights; // normalized to sum 1

  std::size_t size() const { return weights.size(); }
  std::span<const double> item(std::size_t i) const {
    return {values.data() + i * static_cast<std::size_t>(width), static_cast<std::size_t>(width)};
  }
};

// Throws ExtractError("no interior segments; enlarge t or window") if empty.
WeightedSample empirical_distribution(std::span<const MaximalSegment> segments, Weighting mode, Statistic stat);

// Sorted parameters τ with base + τu on a splitting facet.
std::vector<double> line_section(const Tessellation& tess, const Vec& base, const Vec& u);

// Length of {τ : base + τu ∈ W}, with the entry parameter.
std::pair<double, double> window_chord(const ConvexPolytope& window, const Vec& base, const Vec& u);

// Per-tessellation contribution to the density of V_j over maximal
// k-polytopes, k ∈ {1, d-1}, j ∈ {0, k}: content clipped to the shrunken
// window (j = k) or the number of reference points inside it (j = 0),
// divided by its volume.
double density_contribution(const Tessellation& tess, int k, int j, double margin);
double density_estimate(std::span<const Tessellation> tessellations, int k, int j, double margin);

// Edges of a planar PHT: chords subdivided at all crossings.
std::vector<MaximalSegment> pht_edges(const Tessellation& tess);

}  // namespace stit

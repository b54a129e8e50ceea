#pragma once

// File formats: JSON for polytopes, tessellations and reports, CSV for
// segment dumps, SVG for planar tessellations.

#include "stit/engine.hpp"
#include "stit/extract.hpp"
#include "stit/stats.hpp"

#include <json.hpp>

#include <iosfwd>
#include <span>
#include <string>

namespace stit {

inline constexpr const char* kVersion = "1.0.0";

using Json = nlohmann::ordered_json;

Json to_json(const Vec& v, int dim);
Json to_json(const ConvexPolytope& c);
ConvexPolytope polytope_from_json(const Json& j);

Json to_json(const Tessellation& tess);
Tessellation tessellation_from_json(const Json& j);

Json to_json(const EstimateReport& r);
Json to_json(const GofReport& r);
Json to_json(const MaximalSegment& s, int dim);

// length, direction components, birth times, internal vertices, boundary flag
void write_segments_csv(std::ostream& os, std::span<const MaximalSegment> segments, int dim);

struct SvgOptions {
  double size = 480.0;       // pixels along the longer window side
  double dashed_after = -1;  // chords born after this time are dashed; < 0: last quarter of the horizon
  int frames = 1;            // side-by-side states at t/frames, 2t/frames, ..., t
};

// Planar rendering: window outline plus one <line class="chord"> per event
// visible in each frame.
std::string render_svg(const Tessellation& tess, const SvgOptions& opts = {});

}  // namespace stit

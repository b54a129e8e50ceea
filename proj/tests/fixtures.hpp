#pragma once

// Hand-built tessellations: a sequence of splits applied to chosen cells.

#include "stit/engine.hpp"
#include "stit/geometry.hpp"

#include <span>
#include <vector>

namespace stit::testing {

struct Split {
  std::size_t cell;  // index into the current cell list
  Vec normal;
  double offset;
  double birth_time;
};

// Each split replaces cell `cell` by its negative part and appends the
// positive part; event ids are 0, 1, ... in the given order.
inline Tessellation build(const ConvexPolytope& window, std::span<const Split> splits, double horizon) {
  Tessellation tess;
  tess.window = window;
  tess.horizon = horizon;
  tess.q = DirectionalDistribution::axis_aligned(window.dim());
  tess.cells = {window};
  std::int64_t id = 0;
  for (const Split& s : splits) {
    Hyperplane h;
    h.normal = s.normal.normalized();
    h.offset = s.offset / s.normal.norm();
    h.id = id;
    h.birth_time = s.birth_time;
    ClipResult r = clip(tess.cells.at(s.cell), h);
    tess.events.push_back(SplitEvent{id, static_cast<std::int64_t>(s.cell), h, s.birth_time, r.face});
    tess.cells[s.cell] = std::move(r.negative);
    tess.cells.push_back(std::move(r.positive));
    ++id;
  }
  tess.cell_keys.assign(tess.cells.size(), StreamKey::root(0, 0));
  return tess;
}

inline ConvexPolytope unit_box(int d) { return ConvexPolytope::box(std::vector<double>(d, 1.0)); }

inline Vec vec(double x, double y, double z = 0.0) { return Vec(x, y, z); }

}  // namespace stit::testing

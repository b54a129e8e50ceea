#include "stit/extract.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <unordered_map>

namespace stit {

const char* to_string(Weighting mode) { return mode == Weighting::typical ? "typical" : "lengthweighted"; }

const char* to_string(Statistic stat) {
  switch (stat) {
    case Statistic::internal_vertices: return "internal_vertices";
    case Statistic::birth_times: return "birth_times";
    case Statistic::length: return "length";
    case Statistic::last_birth_time: return "last_birth_time";
  }
  return "unknown";
}

Weighting parse_weighting(const std::string& text) {
  if (text == "typical" || text == "0") return Weighting::typical;
  if (text == "lengthweighted" || text == "length-weighted" || text == "length" || text == "1")
    return Weighting::length;
  throw std::invalid_argument("unknown weighting mode '" + text + "'");
}

Statistic parse_statistic(const std::string& text) {
  if (text == "internal_vertices") return Statistic::internal_vertices;
  if (text == "birth_times") return Statistic::birth_times;
  if (text == "length") return Statistic::length;
  if (text == "last_birth_time") return Statistic::last_birth_time;
  throw std::invalid_argument("unknown statistic '" + text + "'");
}

namespace {

bool lex_less(const Vec& p, const Vec& q) {
  if (p.x() != q.x()) return p.x() < q.x();
  if (p.y() != q.y()) return p.y() < q.y();
  return p.z() < q.z();
}

std::unordered_map<std::int64_t, std::size_t> index_events(const Tessellation& tess) {
  std::unordered_map<std::int64_t, std::size_t> at;
  at.reserve(tess.events.size());
  for (std::size_t i = 0; i < tess.events.size(); ++i) at.emplace(tess.events[i].id, i);
  return at;
}

MaximalSegment make_segment(const Vec& a, const Vec& b, int dim) {
  MaximalSegment s;
  s.a = a;
  s.b = b;
  s.length = (b - a).norm();
  if (s.length > 0.0) s.direction = canonical_normal((b - a) / s.length, dim);
  return s;
}

// Parameters (on [p, q] and on [r, w]) and distance of the closest points.
struct Closest {
  double along_first;
  double along_second;
  double distance;
};

Closest closest_points(const Vec& p, const Vec& q, const Vec& r, const Vec& w) {
  const Vec d1 = q - p;
  const Vec d2 = w - r;
  const Vec e = p - r;
  const double a = d1.squaredNorm();
  const double b = d1.dot(d2);
  const double c = d2.squaredNorm();
  const double d = d1.dot(e);
  const double f = d2.dot(e);
  const double denom = a * c - b * b;
  double s = denom > 1e-300 ? std::clamp((b * f - c * d) / denom, 0.0, 1.0) : 0.0;
  double t = (b * s + f) / c;
  if (t < 0.0) {
    t = 0.0;
    s = std::clamp(-d / a, 0.0, 1.0);
  } else if (t > 1.0) {
    t = 1.0;
    s = std::clamp((b - d) / a, 0.0, 1.0);
  }
  return {s, t, ((p + s * d1) - (r + t * d2)).norm()};
}

void finish_segment(MaximalSegment& s) {
  s.touches_boundary = s.end_on_boundary[0] || s.end_on_boundary[1];
  std::sort(s.birth_times.begin(), s.birth_times.end());
}

std::vector<MaximalSegment> segments_2d(const Tessellation& tess) {
  const auto at = index_events(tess);
  std::vector<MaximalSegment> out;
  out.reserve(tess.events.size());
  for (const auto& e : tess.events) {
    MaximalSegment s = make_segment(e.face.vertices[0], e.face.vertices[1], 2);
    s.birth_times = {e.birth_time};
    s.facets = {e.id};
    s.end_on_boundary = {e.face.boundary_tags[0].is_window(), e.face.boundary_tags[1].is_window()};
    out.push_back(std::move(s));
  }
  for (const auto& e : tess.events)
    for (const FacetTag tag : e.face.boundary_tags)
      if (tag.is_split()) ++out[at.at(tag.event_id())].internal_vertices;
  for (auto& s : out) finish_segment(s);
  return out;
}

std::vector<MaximalSegment> segments_3d(const Tessellation& tess) {
  const auto at = index_events(tess);
  std::vector<MaximalSegment> out;
  std::unordered_map<std::int64_t, std::vector<std::size_t>> on_facet;

  for (const auto& e : tess.events) {
    const auto& v = e.face.vertices;
    const auto& tags = e.face.boundary_tags;
    const std::size_t m = v.size();
    for (std::size_t i = 0; i < m; ++i) {
      if (!tags[i].is_split()) continue;
      const auto& earlier = tess.events[at.at(tags[i].event_id())];
      MaximalSegment s = make_segment(v[i], v[(i + 1) % m], 3);
      s.birth_times = {earlier.birth_time, e.birth_time};
      s.facets = {earlier.id, e.id};
      s.end_on_boundary = {tags[(i + m - 1) % m].is_window(), tags[(i + 1) % m].is_window()};
      finish_segment(s);
      on_facet[earlier.id].push_back(out.size());
      on_facet[e.id].push_back(out.size());
      out.push_back(std::move(s));
    }
  }

  // A third facet C meets relint(S) exactly where an edge of C's birth
  // polygon lying on one of S's facets crosses or ends on S.
  const double tol = 1e-9 * tess.window.diameter();
  std::vector<std::vector<std::int64_t>> touching(out.size());
  for (const auto& c : tess.events) {
    const auto& v = c.face.vertices;
    const auto& tags = c.face.boundary_tags;
    const std::size_t m = v.size();
    for (std::size_t i = 0; i < m; ++i) {
      if (!tags[i].is_split()) continue;
      const auto found = on_facet.find(tags[i].event_id());
      if (found == on_facet.end()) continue;
      for (const std::size_t k : found->second) {
        const MaximalSegment& s = out[k];
        if (s.facets[0] == c.id || s.facets[1] == c.id) continue;
        const Closest cp = closest_points(s.a, s.b, v[i], v[(i + 1) % m]);
        if (cp.distance > tol) continue;
        const double along = cp.along_first * s.length;
        if (along <= tol || along >= s.length - tol) continue;
        touching[k].push_back(c.id);
      }
    }
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    auto& ids = touching[k];
    std::sort(ids.begin(), ids.end());
    out[k].internal_vertices = static_cast<int>(std::unique(ids.begin(), ids.end()) - ids.begin());
  }
  return out;
}

// Portion [lo, hi] of the parameter range [0, 1] of p + τ(q - p) inside the box.
std::pair<double, double> clip_to_box(const Vec& p, const Vec& q, const Vec& lo, const Vec& hi, int dim) {
  double t0 = 0.0, t1 = 1.0;
  for (int k = 0; k < dim; ++k) {
    const double d = q[k] - p[k];
    if (std::abs(d) < 1e-300) {
      if (p[k] < lo[k] || p[k] > hi[k]) return {1.0, 0.0};
      continue;
    }
    double a = (lo[k] - p[k]) / d;
    double b = (hi[k] - p[k]) / d;
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
  }
  return {t0, t1};
}

bool in_box(const Vec& x, const Vec& lo, const Vec& hi, int dim) {
  for (int k = 0; k < dim; ++k)
    if (x[k] < lo[k] || x[k] > hi[k]) return false;
  return true;
}

double box_volume(const Vec& lo, const Vec& hi, int dim) {
  double v = 1.0;
  for (int k = 0; k < dim; ++k) v *= hi[k] - lo[k];
  return v;
}

}  // namespace

std::vector<MaximalFacet> maximal_facets(const Tessellation& tess) {
  std::vector<MaximalFacet> out;
  out.reserve(tess.events.size());
  for (const auto& e : tess.events) out.push_back({e.face, e.id, e.birth_time});
  return out;
}

std::vector<MaximalSegment> maximal_segments(const Tessellation& tess) {
  switch (tess.dim()) {
    case 2: return segments_2d(tess);
    case 3: return segments_3d(tess);
    default: throw ExtractError("unsupported dimension for maximal segments");
  }
}

std::vector<SkeletonGroup> skeleton_groups(const Tessellation& tess) {
  if (tess.dim() != 3) throw ExtractError("skeleton grouping needs d = 3");
  const auto at = index_events(tess);
  struct Pieces {
    std::vector<std::pair<Vec, Vec>> edges;
  };
  std::map<std::pair<std::int64_t, std::int64_t>, Pieces> groups;
  for (const auto& cell : tess.cells)
    for (const auto& e : edges_with_tags(cell)) {
      if (e.tags.size() != 2 || !e.tags[0].is_split() || !e.tags[1].is_split()) continue;
      const auto x = e.tags[0].event_id();
      const auto y = e.tags[1].event_id();
      groups[{std::min(x, y), std::max(x, y)}].edges.emplace_back(e.a, e.b);
    }

  const double tol = 1e-9 * tess.window.diameter();
  std::vector<SkeletonGroup> out;
  for (const auto& [key, pieces] : groups) {
    const Hyperplane& h1 = tess.events[at.at(key.first)].plane;
    const Hyperplane& h2 = tess.events[at.at(key.second)].plane;
    const Vec dir = h1.normal.cross(h2.normal).normalized();
    // point on both planes closest to the origin
    Eigen::Matrix3d m;
    m.row(0) = h1.normal;
    m.row(1) = h2.normal;
    m.row(2) = dir;
    const Vec origin = m.colPivHouseholderQr().solve(Vec(h1.offset, h2.offset, 0.0));

    SkeletonGroup g;
    g.first = key.first;
    g.second = key.second;
    std::vector<double> cuts;
    for (const auto& [a, b] : pieces.edges) {
      for (const Vec& p : {a, b}) {
        const double tau = (p - origin).dot(dir);
        g.max_line_distance = std::max(g.max_line_distance, (p - origin - tau * dir).norm());
        cuts.push_back(tau);
      }
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> distinct;
    for (double c : cuts)
      if (distinct.empty() || c - distinct.back() > tol) distinct.push_back(c);
    g.edges = static_cast<int>(distinct.size()) - 1;
    g.length = distinct.back() - distinct.front();
    out.push_back(g);
  }
  return out;
}

std::pair<Vec, Vec> shrunken_box(const ConvexPolytope& window, double margin) {
  if (!(margin >= 0.0 && margin < 0.5)) throw ExtractError("margin must lie in [0, 1/2)");
  if (!window.is_axis_box()) throw ExtractError("minus-sampling needs a box window");
  auto [lo, hi] = window.bounds();
  const Vec side = hi - lo;
  return {lo + margin * side, hi - margin * side};
}

std::vector<MaximalSegment> minus_sample(std::span<const MaximalSegment> segments, const ConvexPolytope& window,
                                         double margin) {
  const auto [lo, hi] = shrunken_box(window, margin);
  const int dim = window.dim();
  std::vector<MaximalSegment> out;
  for (const auto& s : segments)
    if (!s.touches_boundary && in_box(s.a, lo, hi, dim) && in_box(s.b, lo, hi, dim)) out.push_back(s);
  return out;
}

std::vector<MaximalSegment> reference_point_sample(std::span<const MaximalSegment> segments,
                                                   const ConvexPolytope& window, double margin) {
  const auto [lo, hi] = shrunken_box(window, margin);
  const int dim = window.dim();
  std::vector<MaximalSegment> out;
  for (const auto& s : segments) {
    const bool first = lex_less(s.a, s.b);
    const Vec& ref = first ? s.a : s.b;
    if (s.end_on_boundary[first ? 0 : 1]) continue;
    if (in_box(ref, lo, hi, dim)) out.push_back(s);
  }
  return out;
}

std::vector<MaximalSegment> crossing_sample(std::span<const MaximalSegment> segments, int axis, double level) {
  std::vector<MaximalSegment> out;
  for (const auto& s : segments) {
    const double lo = std::min(s.a[axis], s.b[axis]);
    const double hi = std::max(s.a[axis], s.b[axis]);
    if (lo < level && level < hi) out.push_back(s);
  }
  return out;
}

double weight_of(const MaximalSegment& s, Weighting mode) { return mode == Weighting::typical ? 1.0 : s.length; }

WeightedSample empirical_distribution(std::span<const MaximalSegment> segments, Weighting mode, Statistic stat) {
  if (segments.empty()) throw ExtractError("no interior segments; enlarge t or window");
  WeightedSample out;
  out.width = stat == Statistic::birth_times ? static_cast<int>(segments.front().birth_times.size()) : 1;
  out.values.reserve(segments.size() * out.width);
  out.weights.reserve(segments.size());
  double total = 0.0;
  for (const auto& s : segments) {
    switch (stat) {
      case Statistic::internal_vertices: out.values.push_back(s.internal_vertices); break;
      case Statistic::length: out.values.push_back(s.length); break;
      case Statistic::last_birth_time: out.values.push_back(s.birth_times.back()); break;
      case Statistic::birth_times:
        if (static_cast<int>(s.birth_times.size()) != out.width) throw ExtractError("mixed birth-time arity");
        out.values.insert(out.values.end(), s.birth_times.begin(), s.birth_times.end());
        break;
    }
    const double w = weight_of(s, mode);
    out.weights.push_back(w);
    total += w;
  }
  if (!(total > 0.0)) throw ExtractError("no interior segments; enlarge t or window");
  for (double& w : out.weights) w /= total;
  return out;
}

std::vector<double> line_section(const Tessellation& tess, const Vec& base, const Vec& u) {
  std::vector<double> out;
  const int dim = tess.dim();
  for (const auto& e : tess.events) {
    const auto& v = e.face.vertices;
    if (dim == 2) {
      // base + τu = v0 + λ(v1 - v0)
      const Vec d = v[1] - v[0];
      const double det = u.x() * (-d.y()) - u.y() * (-d.x());
      if (std::abs(det) < 1e-300) continue;
      const Vec r = v[0] - base;
      const double tau = (r.x() * (-d.y()) - r.y() * (-d.x())) / det;
      const double lambda = (u.x() * r.y() - u.y() * r.x()) / det;
      if (lambda >= 0.0 && lambda <= 1.0) out.push_back(tau);
    } else {
      const Vec& n = e.plane.normal;
      const double nu = n.dot(u);
      if (std::abs(nu) < 1e-300) continue;
      const double tau = (e.plane.offset - n.dot(base)) / nu;
      const Vec x = base + tau * u;
      bool inside = true;
      const std::size_t m = v.size();
      Vec normal = Vec::Zero();
      for (std::size_t i = 0; i < m; ++i) normal += v[i].cross(v[(i + 1) % m]);
      for (std::size_t i = 0; i < m && inside; ++i)
        inside = (v[(i + 1) % m] - v[i]).cross(x - v[i]).dot(normal) >= 0.0;
      if (inside) out.push_back(tau);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::pair<double, double> window_chord(const ConvexPolytope& window, const Vec& base, const Vec& u) {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (const auto& f : window.facets()) {
    const double nu = f.normal.dot(u);
    const double slack = f.offset - f.normal.dot(base);
    if (std::abs(nu) < 1e-300) {
      if (slack < 0.0) return {0.0, 0.0};
      continue;
    }
    if (nu > 0.0)
      hi = std::min(hi, slack / nu);
    else
      lo = std::max(lo, slack / nu);
  }
  if (!(hi > lo)) return {0.0, 0.0};
  return {hi - lo, lo};
}

double density_contribution(const Tessellation& tess, int k, int j, double margin) {
  const int dim = tess.dim();
  if (k != 1 && k != dim - 1) throw ExtractError("density needs k = 1 or k = d - 1");
  if (j != 0 && j != k) throw ExtractError("density needs j = 0 or j = k");
  const auto [lo, hi] = shrunken_box(tess.window, margin);
  double sum = 0.0;

  if (k == 1) {
    for (const auto& s : maximal_segments(tess)) {
      if (j == 1) {
        const auto [t0, t1] = clip_to_box(s.a, s.b, lo, hi, dim);
        if (t1 > t0) sum += (t1 - t0) * s.length;
      } else {
        const bool first = lex_less(s.a, s.b);
        if (!s.end_on_boundary[first ? 0 : 1] && in_box(first ? s.a : s.b, lo, hi, dim)) sum += 1.0;
      }
    }
    return sum / box_volume(lo, hi, dim);
  }

  // facets in d = 3
  for (const auto& e : tess.events) {
    const auto& v = e.face.vertices;
    const auto& tags = e.face.boundary_tags;
    if (j == k) {
      std::vector<Vec> poly = v;
      for (int a = 0; a < 3 && !poly.empty(); ++a) {
        Vec n = Vec::Zero();
        n[a] = 1.0;
        poly = clip_polygon(poly, n, hi[a]);
        if (!poly.empty()) poly = clip_polygon(poly, -n, -lo[a]);
      }
      if (poly.size() >= 3) sum += polygon_area(poly);
    } else {
      const std::size_t m = v.size();
      std::size_t best = 0;
      for (std::size_t i = 1; i < m; ++i)
        if (lex_less(v[i], v[best])) best = i;
      const bool on_boundary = tags[best].is_window() || tags[(best + m - 1) % m].is_window();
      if (!on_boundary && in_box(v[best], lo, hi, dim)) sum += 1.0;
    }
  }
  return sum / box_volume(lo, hi, dim);
}

double density_estimate(std::span<const Tessellation> tessellations, int k, int j, double margin) {
  if (tessellations.empty()) throw ExtractError("no tessellations");
  double sum = 0.0;
  for (const auto& t : tessellations) sum += density_contribution(t, k, j, margin);
  return sum / static_cast<double>(tessellations.size());
}

std::vector<MaximalSegment> pht_edges(const Tessellation& tess) {
  if (tess.dim() != 2) throw ExtractError("PHT edge extraction needs d = 2");
  std::vector<MaximalSegment> out;
  const auto& ev = tess.events;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    const Vec& p = ev[i].face.vertices[0];
    const Vec d = ev[i].face.vertices[1] - p;
    std::vector<double> cuts{0.0, 1.0};
    for (std::size_t k = 0; k < ev.size(); ++k) {
      if (k == i) continue;
      const Vec& r = ev[k].face.vertices[0];
      const Vec e = ev[k].face.vertices[1] - r;
      const double det = d.x() * (-e.y()) - d.y() * (-e.x());
      if (std::abs(det) < 1e-300) continue;
      const Vec w = r - p;
      const double a = (w.x() * (-e.y()) - w.y() * (-e.x())) / det;
      const double b = (d.x() * w.y() - d.y() * w.x()) / det;
      if (a > 0.0 && a < 1.0 && b > 0.0 && b < 1.0) cuts.push_back(a);
    }
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      MaximalSegment s = make_segment(p + cuts[c] * d, p + cuts[c + 1] * d, 2);
      s.birth_times = {ev[i].birth_time};
      s.facets = {ev[i].id};
      s.end_on_boundary = {c == 0, c + 2 == cuts.size()};
      finish_segment(s);
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace stit

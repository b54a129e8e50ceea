#include "stit/geometry.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

namespace stit {

std::int64_t FacetTag::event_id() const {
  if (is_window()) throw GeometryError("window facet has no event id");
  return value_;
}

std::string to_string(FacetTag tag) {
  return tag.is_window() ? std::string("window") : "split:" + std::to_string(tag.raw());
}

namespace {

Vec newell_normal(std::span<const Vec> cycle) {
  Vec n = Vec::Zero();
  const std::size_t m = cycle.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Vec& a = cycle[i];
    const Vec& b = cycle[(i + 1) % m];
    n += a.cross(b);
  }
  return n;  // |n| = 2 * area
}

double polygon_volume_2d(const std::vector<Vec>& v, const std::vector<Facet>& facets) {
  double twice = 0.0;
  for (const Facet& f : facets) {
    const Vec& a = v[f.cycle[0]];
    const Vec& b = v[f.cycle[1]];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * twice;
}

double polyhedron_volume(const std::vector<Vec>& v, const std::vector<Facet>& facets) {
  double sum = 0.0;
  for (const Facet& f : facets) {
    std::vector<Vec> cyc;
    cyc.reserve(f.cycle.size());
    for (int i : f.cycle) cyc.push_back(v[i]);
    const Vec nn = newell_normal(cyc);
    // signed area along the outward normal
    sum += f.offset * 0.5 * nn.dot(f.normal);
  }
  return sum / 3.0;
}

double max_pairwise(const std::vector<Vec>& v) {
  double best = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) best = std::max(best, (v[i] - v[j]).squaredNorm());
  return std::sqrt(best);
}

std::vector<double> classify(const ConvexPolytope& c, const Hyperplane& h) {
  const double tol = c.tolerance();
  std::vector<double> dist(c.vertices().size());
  for (std::size_t i = 0; i < dist.size(); ++i) {
    double d = h.signed_distance(c.vertices()[i]);
    if (std::abs(d) <= tol) d = 0.0;
    dist[i] = d;
  }
  return dist;
}

Vec lerp_on_plane(const Vec& a, const Vec& b, double da, double db) {
  const double s = da / (da - db);
  return a + s * (b - a);
}

ClipResult clip_2d(const ConvexPolytope& c, const Hyperplane& h, const std::vector<double>& dist) {
  // Rebuild the polygon as a ccw vertex cycle with per-edge tags.
  const auto& facets = c.facets();
  const auto& verts = c.vertices();
  const std::size_t m = facets.size();
  std::vector<int> order(m);
  std::vector<const Facet*> out_edge(m);
  {
    std::unordered_map<int, const Facet*> by_start;
    for (const Facet& f : facets) by_start[f.cycle[0]] = &f;
    int cur = facets.front().cycle[0];
    for (std::size_t k = 0; k < m; ++k) {
      order[k] = cur;
      const Facet* f = by_start.at(cur);
      out_edge[k] = f;
      cur = f->cycle[1];
    }
  }

  struct Out {
    std::vector<Vec> pts;
    std::vector<const Facet*> edges;  // nullptr = the new split edge
  };
  const FacetTag split_tag = FacetTag::split(h.id);

  auto build = [&](double sign) {
    Out out;
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t k1 = (k + 1) % m;
      const double d0 = sign * dist[order[k]];
      const double d1 = sign * dist[order[k1]];
      const Vec& p0 = verts[order[k]];
      const Vec& p1 = verts[order[k1]];
      if (d0 >= 0.0) {
        out.pts.push_back(p0);
        if (d1 >= 0.0) {
          out.edges.push_back(out_edge[k]);
        } else if (d0 > 0.0) {
          out.edges.push_back(out_edge[k]);
          out.pts.push_back(lerp_on_plane(p0, p1, d0, d1));
          out.edges.push_back(nullptr);
        } else {
          out.edges.push_back(nullptr);
        }
      } else if (d1 > 0.0) {
        out.pts.push_back(lerp_on_plane(p0, p1, d0, d1));
        out.edges.push_back(out_edge[k]);
      }
    }
    return out;
  };

  auto assemble = [&](const Out& out, double sign) {
    std::vector<Facet> fs;
    const std::size_t n = out.pts.size();
    for (std::size_t k = 0; k < n; ++k) {
      Facet f;
      f.cycle = {static_cast<int>(k), static_cast<int>((k + 1) % n)};
      if (out.edges[k] != nullptr) {
        f.normal = out.edges[k]->normal;
        f.offset = out.edges[k]->offset;
        f.tag = out.edges[k]->tag;
      } else {
        f.normal = -sign * h.normal;
        f.offset = -sign * h.offset;
        f.tag = split_tag;
      }
      fs.push_back(std::move(f));
    }
    return ConvexPolytope(2, out.pts, std::move(fs));
  };

  const Out pos = build(1.0);
  const Out neg = build(-1.0);

  ClipResult r;
  r.positive = assemble(pos, 1.0);
  r.negative = assemble(neg, -1.0);

  // Face: the split edge of the positive part, with endpoint provenance.
  r.face.dim = 2;
  const std::size_t n = pos.pts.size();
  for (std::size_t k = 0; k < n; ++k) {
    if (pos.edges[k] != nullptr) continue;
    const std::size_t prev = (k + n - 1) % n;
    const std::size_t next = (k + 1) % n;
    r.face.vertices = {pos.pts[k], pos.pts[next]};
    r.face.boundary_tags = {pos.edges[prev] ? pos.edges[prev]->tag : FacetTag::window(),
                            pos.edges[next] ? pos.edges[next]->tag : FacetTag::window()};
    break;
  }
  return r;
}

ClipResult clip_3d(const ConvexPolytope& c, const Hyperplane& h, const std::vector<double>& dist_in) {
  std::vector<Vec> pool = c.vertices();
  std::vector<double> dist = dist_in;
  std::map<std::pair<int, int>, int> cut_vertex;

  auto intersection = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto it = cut_vertex.find(key);
    if (it != cut_vertex.end()) return it->second;
    const int idx = static_cast<int>(pool.size());
    pool.push_back(lerp_on_plane(pool[key.first], pool[key.second], dist[key.first], dist[key.second]));
    dist.push_back(0.0);
    cut_vertex.emplace(key, idx);
    return idx;
  };

  struct CapEdge {
    int a, b;
    FacetTag tag;
  };
  std::vector<Facet> pos_facets, neg_facets;
  std::vector<CapEdge> cap;

  for (const Facet& f : c.facets()) {
    std::vector<int> pc, nc, on_plane;
    const std::size_t m = f.cycle.size();
    for (std::size_t k = 0; k < m; ++k) {
      const int a = f.cycle[k];
      const int b = f.cycle[(k + 1) % m];
      const double da = dist[a];
      const double db = dist[b];
      if (da >= 0.0) pc.push_back(a);
      if (da <= 0.0) nc.push_back(a);
      if (da == 0.0) on_plane.push_back(a);
      if ((da > 0.0 && db < 0.0) || (da < 0.0 && db > 0.0)) {
        const int x = intersection(a, b);
        pc.push_back(x);
        nc.push_back(x);
        on_plane.push_back(x);
      }
    }
    auto keep = [&](std::vector<int>& cyc, std::vector<Facet>& out) {
      if (cyc.size() < 3) return;
      bool strict = false;
      for (int i : cyc) strict = strict || dist[i] != 0.0;
      if (!strict) return;
      Facet g = f;
      g.cycle = std::move(cyc);
      out.push_back(std::move(g));
    };
    keep(pc, pos_facets);
    keep(nc, neg_facets);
    if (on_plane.size() == 2) cap.push_back({on_plane[0], on_plane[1], f.tag});
  }

  // Drop duplicate cap edges (h through an existing edge).
  {
    std::vector<CapEdge> uniq;
    for (const CapEdge& e : cap) {
      bool dup = false;
      for (const CapEdge& u : uniq)
        dup = dup || (std::minmax(u.a, u.b) == std::minmax(e.a, e.b));
      if (!dup) uniq.push_back(e);
    }
    cap.swap(uniq);
  }
  if (cap.size() < 3) throw GeometryError("non-splitting hyperplane");

  // Chain cap edges into a cycle.
  std::vector<int> cyc;
  std::vector<FacetTag> cyc_tags;
  {
    std::vector<bool> used(cap.size(), false);
    cyc.push_back(cap[0].a);
    int cur = cap[0].b;
    cyc_tags.push_back(cap[0].tag);
    used[0] = true;
    for (std::size_t step = 1; step < cap.size(); ++step) {
      bool found = false;
      for (std::size_t e = 0; e < cap.size() && !found; ++e) {
        if (used[e]) continue;
        if (cap[e].a == cur || cap[e].b == cur) {
          used[e] = true;
          cyc.push_back(cur);
          cyc_tags.push_back(cap[e].tag);
          cur = cap[e].a == cur ? cap[e].b : cap[e].a;
          found = true;
        }
      }
      if (!found) throw GeometryError("clip produced an open cap polygon");
    }
    if (cur != cyc.front()) throw GeometryError("clip produced an open cap polygon");
  }

  // Orient the cap so that its Newell normal points along h.normal.
  {
    std::vector<Vec> pts;
    for (int i : cyc) pts.push_back(pool[i]);
    if (newell_normal(pts).dot(h.normal) < 0.0) {
      std::reverse(cyc.begin(), cyc.end());
      // edge k was (k, k+1); after reversal edge k joins old (m-1-k, m-2-k)
      std::vector<FacetTag> t(cyc_tags.size());
      const std::size_t m = cyc_tags.size();
      for (std::size_t k = 0; k < m; ++k) t[k] = cyc_tags[(2 * m - 2 - k) % m];
      cyc_tags.swap(t);
    }
  }

  const FacetTag split_tag = FacetTag::split(h.id);
  {
    Facet pos_cap;  // outward normal of the positive part is -n
    pos_cap.normal = -h.normal;
    pos_cap.offset = -h.offset;
    pos_cap.tag = split_tag;
    pos_cap.cycle.assign(cyc.rbegin(), cyc.rend());
    pos_facets.push_back(std::move(pos_cap));
    Facet neg_cap;
    neg_cap.normal = h.normal;
    neg_cap.offset = h.offset;
    neg_cap.tag = split_tag;
    neg_cap.cycle = cyc;
    neg_facets.push_back(std::move(neg_cap));
  }

  auto compact = [&](std::vector<Facet> fs) {
    std::vector<int> remap(pool.size(), -1);
    std::vector<Vec> verts;
    for (Facet& f : fs)
      for (int& i : f.cycle) {
        if (remap[i] < 0) {
          remap[i] = static_cast<int>(verts.size());
          verts.push_back(pool[i]);
        }
        i = remap[i];
      }
    return ConvexPolytope(3, std::move(verts), std::move(fs));
  };

  ClipResult r;
  r.positive = compact(std::move(pos_facets));
  r.negative = compact(std::move(neg_facets));
  r.face.dim = 3;
  for (int i : cyc) r.face.vertices.push_back(pool[i]);
  r.face.boundary_tags = std::move(cyc_tags);
  return r;
}

}  // namespace

double Face::content() const {
  if (vertices.size() < 2) return 0.0;
  if (dim == 2) return (vertices[1] - vertices[0]).norm();
  return polygon_area(vertices);
}

Face Face::scaled(double r) const {
  Face f = *this;
  for (Vec& v : f.vertices) v *= r;
  return f;
}

ConvexPolytope::ConvexPolytope(int dim, std::vector<Vec> vertices, std::vector<Facet> facets)
    : dim_(dim), vertices_(std::move(vertices)), facets_(std::move(facets)) {
  if (dim_ != 2 && dim_ != 3) throw GeometryError("unsupported polytope dimension");
  if (vertices_.empty()) throw GeometryError("empty body");
  for (const Facet& f : facets_) {
    const std::size_t need = dim_ == 2 ? 2 : 3;
    if (f.cycle.size() < need) throw GeometryError("degenerate facet");
    for (int i : f.cycle)
      if (i < 0 || static_cast<std::size_t>(i) >= vertices_.size())
        throw GeometryError("facet references a missing vertex");
  }
  volume_ = dim_ == 2 ? polygon_volume_2d(vertices_, facets_) : polyhedron_volume(vertices_, facets_);
  diameter_ = max_pairwise(vertices_);
}

ConvexPolytope ConvexPolytope::box(const Vec& lo, const Vec& hi, int dim) {
  if (dim == 2) {
    std::vector<Vec> v = {Vec(lo.x(), lo.y(), 0), Vec(hi.x(), lo.y(), 0), Vec(hi.x(), hi.y(), 0),
                          Vec(lo.x(), hi.y(), 0)};
    const Vec normals[4] = {Vec(0, -1, 0), Vec(1, 0, 0), Vec(0, 1, 0), Vec(-1, 0, 0)};
    std::vector<Facet> fs;
    for (int k = 0; k < 4; ++k) {
      Facet f;
      f.normal = normals[k];
      f.cycle = {k, (k + 1) % 4};
      f.offset = f.normal.dot(v[k]);
      f.tag = FacetTag::window();
      fs.push_back(std::move(f));
    }
    return ConvexPolytope(2, std::move(v), std::move(fs));
  }
  if (dim != 3) throw GeometryError("unsupported polytope dimension");
  std::vector<Vec> v(8);
  for (int i = 0; i < 8; ++i)
    v[i] = Vec((i & 1) ? hi.x() : lo.x(), (i & 2) ? hi.y() : lo.y(), (i & 4) ? hi.z() : lo.z());
  // ccw seen from outside
  const std::vector<std::pair<Vec, std::vector<int>>> faces = {
      {Vec(-1, 0, 0), {0, 4, 6, 2}}, {Vec(1, 0, 0), {1, 3, 7, 5}}, {Vec(0, -1, 0), {0, 1, 5, 4}},
      {Vec(0, 1, 0), {2, 6, 7, 3}},  {Vec(0, 0, -1), {0, 2, 3, 1}}, {Vec(0, 0, 1), {4, 5, 7, 6}}};
  std::vector<Facet> fs;
  for (const auto& [n, cyc] : faces) {
    Facet f;
    f.normal = n;
    f.cycle = cyc;
    f.offset = n.dot(v[cyc[0]]);
    f.tag = FacetTag::window();
    fs.push_back(std::move(f));
  }
  return ConvexPolytope(3, std::move(v), std::move(fs));
}

ConvexPolytope ConvexPolytope::box(std::span<const double> sides) {
  const int dim = static_cast<int>(sides.size());
  Vec hi = Vec::Zero();
  for (int i = 0; i < dim; ++i) {
    if (!(sides[i] > 0.0)) throw GeometryError("box sides must be positive");
    hi[i] = sides[i];
  }
  return box(Vec::Zero(), hi, dim);
}

bool ConvexPolytope::contains(const Vec& x, double tol) const {
  for (const Facet& f : facets_)
    if (f.normal.dot(x) - f.offset > tol) return false;
  return true;
}

Vec ConvexPolytope::centroid() const {
  Vec s = Vec::Zero();
  for (const Vec& v : vertices_) s += v;
  return s / static_cast<double>(vertices_.size());
}

ConvexPolytope ConvexPolytope::scaled(double r) const {
  if (!(r > 0.0)) throw GeometryError("scale factor must be positive");
  std::vector<Vec> v = vertices_;
  for (Vec& p : v) p *= r;
  std::vector<Facet> fs = facets_;
  for (Facet& f : fs) f.offset *= r;
  return ConvexPolytope(dim_, std::move(v), std::move(fs));
}

std::pair<Vec, Vec> ConvexPolytope::bounds() const {
  Vec lo = Vec::Constant(std::numeric_limits<double>::infinity());
  Vec hi = -lo;
  for (const Vec& v : vertices_) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  if (dim_ == 2) lo.z() = hi.z() = 0.0;
  return {lo, hi};
}

bool ConvexPolytope::is_axis_box() const {
  if (static_cast<int>(facets_.size()) != 2 * dim_) return false;
  for (const Facet& f : facets_) {
    int nonzero = 0;
    for (int i = 0; i < 3; ++i) nonzero += std::abs(f.normal[i]) > 1e-12;
    if (nonzero != 1) return false;
  }
  return true;
}

bool splits(const ConvexPolytope& c, const Hyperplane& h) {
  bool pos = false, neg = false;
  const double tol = c.tolerance();
  for (const Vec& v : c.vertices()) {
    const double d = h.signed_distance(v);
    pos = pos || d > tol;
    neg = neg || d < -tol;
  }
  return pos && neg;
}

ClipResult clip(const ConvexPolytope& c, const Hyperplane& h) {
  if (c.empty()) throw GeometryError("empty body");
  const std::vector<double> dist = classify(c, h);
  const bool pos = std::any_of(dist.begin(), dist.end(), [](double d) { return d > 0.0; });
  const bool neg = std::any_of(dist.begin(), dist.end(), [](double d) { return d < 0.0; });
  if (!pos || !neg) throw GeometryError("non-splitting hyperplane");
  return c.dim() == 2 ? clip_2d(c, h, dist) : clip_3d(c, h, dist);
}

std::vector<TaggedEdge> edges_with_tags(const ConvexPolytope& c) {
  std::vector<TaggedEdge> out;
  if (c.dim() == 2) {
    for (const Facet& f : c.facets())
      out.push_back({c.vertices()[f.cycle[0]], c.vertices()[f.cycle[1]], {f.tag}});
    return out;
  }
  if (c.dim() != 3) throw GeometryError("unsupported dimension for edge extraction");
  std::map<std::pair<int, int>, std::size_t> index;
  for (const Facet& f : c.facets()) {
    const std::size_t m = f.cycle.size();
    for (std::size_t k = 0; k < m; ++k) {
      const auto key = std::minmax(f.cycle[k], f.cycle[(k + 1) % m]);
      auto it = index.find(key);
      if (it == index.end()) {
        index.emplace(key, out.size());
        out.push_back({c.vertices()[key.first], c.vertices()[key.second], {f.tag}});
      } else {
        out[it->second].tags.push_back(f.tag);
      }
    }
  }
  return out;
}

double volume(const ConvexPolytope& c) {
  if (c.empty()) throw GeometryError("empty body");
  return c.volume();
}

double diameter(const ConvexPolytope& c) {
  if (c.empty()) throw GeometryError("empty body");
  return c.diameter();
}

double width(std::span<const Vec> points, const Vec& n) {
  if (points.empty()) throw GeometryError("empty body");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const Vec& p : points) {
    const double s = p.dot(n);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  return hi - lo;
}

double width(const ConvexPolytope& c, const Vec& n) { return width(std::span<const Vec>(c.vertices()), n); }

double polygon_area(std::span<const Vec> cycle) { return 0.5 * newell_normal(cycle).norm(); }

std::vector<Vec> clip_polygon(std::span<const Vec> polygon, const Vec& n, double offset) {
  std::vector<Vec> out;
  const std::size_t m = polygon.size();
  for (std::size_t k = 0; k < m; ++k) {
    const Vec& a = polygon[k];
    const Vec& b = polygon[(k + 1) % m];
    const double da = offset - n.dot(a);
    const double db = offset - n.dot(b);
    if (da >= 0.0) out.push_back(a);
    if ((da > 0.0 && db < 0.0) || (da < 0.0 && db > 0.0)) out.push_back(lerp_on_plane(a, b, da, db));
  }
  return out;
}

}  // namespace stit

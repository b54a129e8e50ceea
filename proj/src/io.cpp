#include "stit/io.hpp"

#include <iomanip>
#include <ostream>
#include <sstream>

namespace stit {

Json to_json(const Vec& v, int dim) {
  Json a = Json::array();
  for (int k = 0; k < dim; ++k) a.push_back(v[k]);
  return a;
}

namespace {

Vec vec_from_json(const Json& j) {
  Vec v = Vec::Zero();
  if (!j.is_array() || j.size() < 2 || j.size() > 3) throw std::invalid_argument("point must have 2 or 3 coordinates");
  for (std::size_t k = 0; k < j.size(); ++k) v[static_cast<int>(k)] = j[k].get<double>();
  return v;
}

Json tag_json(FacetTag tag) { return tag.is_window() ? Json("window") : Json(tag.event_id()); }

FacetTag tag_from_json(const Json& j) {
  if (j.is_string() && j.get<std::string>() == "window") return FacetTag::window();
  return FacetTag::split(j.get<std::int64_t>());
}

Json face_json(const Face& f) {
  Json vs = Json::array();
  for (const Vec& v : f.vertices) vs.push_back(to_json(v, f.dim));
  Json tags = Json::array();
  for (FacetTag t : f.boundary_tags) tags.push_back(tag_json(t));
  return Json{{"vertices", vs}, {"boundary_tags", tags}};
}

Face face_from_json(const Json& j, int dim) {
  Face f;
  f.dim = dim;
  for (const auto& v : j.at("vertices")) f.vertices.push_back(vec_from_json(v));
  for (const auto& t : j.at("boundary_tags")) f.boundary_tags.push_back(tag_from_json(t));
  return f;
}

}  // namespace

Json to_json(const ConvexPolytope& c) {
  Json vs = Json::array();
  for (const Vec& v : c.vertices()) vs.push_back(to_json(v, c.dim()));
  Json fs = Json::array();
  for (const Facet& f : c.facets())
    fs.push_back(Json{{"tag", tag_json(f.tag)},
                      {"normal", to_json(f.normal, c.dim())},
                      {"offset", f.offset},
                      {"vertex_indices", f.cycle}});
  return Json{{"dim", c.dim()}, {"vertices", vs}, {"facets", fs}};
}

ConvexPolytope polytope_from_json(const Json& j) {
  const int dim = j.at("dim").get<int>();
  std::vector<Vec> vs;
  for (const auto& v : j.at("vertices")) vs.push_back(vec_from_json(v));
  std::vector<Facet> fs;
  for (const auto& f : j.at("facets")) {
    Facet facet;
    facet.tag = tag_from_json(f.at("tag"));
    facet.normal = vec_from_json(f.at("normal"));
    facet.offset = f.at("offset").get<double>();
    facet.cycle = f.at("vertex_indices").get<std::vector<int>>();
    fs.push_back(std::move(facet));
  }
  return ConvexPolytope(dim, std::move(vs), std::move(fs));
}

Json to_json(const Tessellation& tess) {
  const int dim = tess.dim();
  Json events = Json::array();
  for (const auto& e : tess.events)
    events.push_back(Json{{"id", e.id},
                          {"parent_cell", e.parent_cell},
                          {"birth_time", e.birth_time},
                          {"hyperplane", Json{{"normal", to_json(e.plane.normal, dim)}, {"offset", e.plane.offset}}},
                          {"face", face_json(e.face)}});
  Json cells = Json::array();
  for (const auto& c : tess.cells) cells.push_back(to_json(c));
  return Json{{"kind", to_string(tess.kind)},
              {"dim", dim},
              {"Q", tess.q.describe()},
              {"t", tess.horizon},
              {"seed", tess.seed.seed},
              {"replicate", tess.seed.replicate},
              {"window", to_json(tess.window)},
              {"events", events},
              {"cells", cells}};
}

Tessellation tessellation_from_json(const Json& j) {
  Tessellation tess;
  const std::string kind = j.value("kind", "stit");
  tess.kind = kind == "pht" ? TessellationKind::pht : kind == "iterated" ? TessellationKind::iterated
                                                                          : TessellationKind::stit;
  const int dim = j.at("dim").get<int>();
  tess.window = polytope_from_json(j.at("window"));
  tess.q = DirectionalDistribution::parse(j.at("Q").get<std::string>(), dim);
  tess.horizon = j.at("t").get<double>();
  tess.seed = {j.value("seed", std::uint64_t{0}), j.value("replicate", std::uint64_t{0})};
  for (const auto& e : j.at("events")) {
    SplitEvent ev;
    ev.id = e.at("id").get<std::int64_t>();
    ev.parent_cell = e.value("parent_cell", std::int64_t{-1});
    ev.birth_time = e.at("birth_time").get<double>();
    ev.plane.normal = vec_from_json(e.at("hyperplane").at("normal"));
    ev.plane.offset = e.at("hyperplane").at("offset").get<double>();
    ev.plane.id = ev.id;
    ev.plane.birth_time = ev.birth_time;
    ev.face = face_from_json(e.at("face"), dim);
    tess.events.push_back(std::move(ev));
  }
  for (const auto& c : j.at("cells")) tess.cells.push_back(polytope_from_json(c));
  return tess;
}

Json to_json(const EstimateReport& r) {
  return Json{{"statistic", r.statistic},   {"mode", r.mode},
              {"estimate", r.estimate},     {"std_error", r.std_error},
              {"ci95", {r.ci_low, r.ci_high}}, {"jackknife_corrected", r.jackknife_corrected},
              {"effective_n", r.effective_n}, {"raw_count", r.raw_count},
              {"replicates", r.replicates}};
}

Json to_json(const GofReport& r) {
  return Json{{"test", r.test}, {"statistic", r.statistic}, {"p_value", r.p_value},
              {"grid", r.grid}, {"n", r.n},                 {"design_effect", r.design_effect}};
}

Json to_json(const MaximalSegment& s, int dim) {
  return Json{{"a", to_json(s.a, dim)},
              {"b", to_json(s.b, dim)},
              {"length", s.length},
              {"direction", to_json(s.direction, dim)},
              {"birth_times", s.birth_times},
              {"facets", s.facets},
              {"internal_vertices", s.internal_vertices},
              {"touches_boundary", s.touches_boundary}};
}

void write_segments_csv(std::ostream& os, std::span<const MaximalSegment> segments, int dim) {
  const char* axes = "xyz";
  os << "length";
  for (int k = 0; k < dim; ++k) os << ",dir_" << axes[k];
  for (int k = 1; k < dim; ++k) os << ",birth_" << k;
  os << ",internal_vertices,touches_boundary\n";
  os << std::setprecision(17);
  for (const auto& s : segments) {
    os << s.length;
    for (int k = 0; k < dim; ++k) os << ',' << s.direction[k];
    for (double b : s.birth_times) os << ',' << b;
    os << ',' << s.internal_vertices << ',' << (s.touches_boundary ? 1 : 0) << '\n';
  }
}

std::string render_svg(const Tessellation& tess, const SvgOptions& opts) {
  if (tess.dim() != 2) throw std::invalid_argument("SVG rendering needs d = 2");
  const int frames = std::max(1, opts.frames);
  const auto [lo, hi] = tess.window.bounds();
  const Vec span = hi - lo;
  const double scale = opts.size / std::max(span.x(), span.y());
  const double pad = 10.0;
  const double frame_w = span.x() * scale + 2.0 * pad;
  const double frame_h = span.y() * scale + 2.0 * pad;

  std::ostringstream os;
  os << std::setprecision(8);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << frame_w * frames << "\" height=\"" << frame_h
     << "\" viewBox=\"0 0 " << frame_w * frames << ' ' << frame_h << "\">\n";
  os << "<style>.window{fill:none;stroke:#000;stroke-width:1.5}"
        ".chord{stroke:#000;stroke-width:1}.new{stroke-dasharray:5,3}</style>\n";

  auto px = [&](const Vec& v, int f) {
    return std::pair{pad + f * frame_w + (v.x() - lo.x()) * scale, pad + (hi.y() - v.y()) * scale};
  };
  for (int f = 0; f < frames; ++f) {
    const double until = tess.horizon * (f + 1) / frames;
    double since = tess.horizon * f / frames;
    if (frames == 1) since = opts.dashed_after >= 0.0 ? opts.dashed_after : 0.75 * tess.horizon;
    os << "<g id=\"frame" << f << "\" data-time=\"" << until << "\">\n";
    os << "<polygon class=\"window\" points=\"";
    // walk the boundary: each edge's end is the next edge's start
    const auto& facets = tess.window.facets();
    std::size_t at = 0;
    for (std::size_t step = 0; step < facets.size(); ++step) {
      const auto [x, y] = px(tess.window.vertices()[facets[at].cycle[0]], f);
      os << x << ',' << y << ' ';
      for (std::size_t k = 0; k < facets.size(); ++k)
        if (facets[k].cycle[0] == facets[at].cycle[1]) {
          at = k;
          break;
        }
    }
    os << "\"/>\n";
    for (const auto& e : tess.events) {
      if (e.birth_time > until) continue;
      const auto [x1, y1] = px(e.face.vertices[0], f);
      const auto [x2, y2] = px(e.face.vertices[1], f);
      os << "<line class=\"chord" << (e.birth_time > since ? " new" : "") << "\" data-id=\"" << e.id << "\" x1=\""
         << x1 << "\" y1=\"" << y1 << "\" x2=\"" << x2 << "\" y2=\"" << y2 << "\"/>\n";
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace stit

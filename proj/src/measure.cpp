#include "stit/measure.hpp"

#include "stit/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace stit {

namespace {

constexpr double kUnitTol = 1e-12;

// Perimeter of the planar convex hull (z ignored).
double hull_perimeter_2d(std::span<const Vec> points) {
  std::vector<std::pair<double, double>> p;
  p.reserve(points.size());
  for (const Vec& v : points) p.emplace_back(v.x(), v.y());
  std::sort(p.begin(), p.end());
  p.erase(std::unique(p.begin(), p.end()), p.end());
  if (p.size() < 2) return 0.0;
  auto cross = [](auto o, auto a, auto b) {
    return (a.first - o.first) * (b.second - o.second) - (a.second - o.second) * (b.first - o.first);
  };
  std::vector<std::pair<double, double>> h(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  h.resize(k - 1);
  if (h.size() < 2) return 0.0;
  double per = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const auto& a = h[i];
    const auto& b = h[(i + 1) % h.size()];
    per += std::hypot(b.first - a.first, b.second - a.second);
  }
  return per;
}

// Mean width of a convex polyhedron: (1/4π) Σ_e ℓ_e (π - α_e), α_e the
// interior dihedral angle, i.e. π - α_e is the angle between the outward
// normals of the two incident facets.
double mean_width_polyhedron(const ConvexPolytope& c) {
  std::map<std::pair<int, int>, std::vector<const Facet*>> edges;
  for (const Facet& f : c.facets()) {
    const std::size_t m = f.cycle.size();
    for (std::size_t k = 0; k < m; ++k) edges[std::minmax(f.cycle[k], f.cycle[(k + 1) % m])].push_back(&f);
  }
  double sum = 0.0;
  for (const auto& [key, fs] : edges) {
    if (fs.size() != 2) throw MeasureError("polyhedron edge without two incident facets");
    const double len = (c.vertices()[key.first] - c.vertices()[key.second]).norm();
    const double cosang = std::clamp(fs[0]->normal.dot(fs[1]->normal), -1.0, 1.0);
    sum += len * std::acos(cosang);
  }
  return sum / (4.0 * std::numbers::pi);
}

Vec random_unit(int dim, Stream& rng) {
  for (;;) {
    Vec n = Vec::Zero();
    for (int i = 0; i < dim; ++i) n[i] = rng.normal();
    const double r = n.norm();
    if (r > 1e-12) return n / r;
  }
}

}  // namespace

Vec canonical_normal(const Vec& n_in, int dim) {
  Vec n = n_in;
  for (int i = dim; i < 3; ++i) n[i] = 0.0;
  const double r = n.norm();
  if (!(r > 0.0)) throw MeasureError("zero normal");
  n /= r;
  if (std::abs(n[dim - 1]) > kUnitTol) return n[dim - 1] > 0.0 ? n : Vec(-n);
  // Equator: first nonzero coordinate positive.
  for (int j = 0; j < dim; ++j)
    if (std::abs(n[j]) > kUnitTol) return n[j] > 0.0 ? n : Vec(-n);
  return n;
}

DirectionalDistribution DirectionalDistribution::isotropic(int dim) {
  if (dim < 2) throw MeasureError("dimension must be at least 2");
  DirectionalDistribution q;
  q.dim_ = dim;
  q.kind_ = DirectionKind::isotropic;
  return q;
}

DirectionalDistribution DirectionalDistribution::axis_aligned(int dim) {
  if (dim < 2 || dim > 3) throw MeasureError("axis-aligned directions need d in {2, 3}");
  DirectionalDistribution q;
  q.dim_ = dim;
  q.kind_ = DirectionKind::axis_aligned;
  for (int i = 0; i < dim; ++i) {
    DirectionAtom a;
    a.normal[i] = 1.0;
    a.weight = 1.0 / dim;
    q.atoms_.push_back(a);
  }
  return q;
}

DirectionalDistribution DirectionalDistribution::discrete(int dim, std::vector<DirectionAtom> atoms) {
  if (dim < 2 || dim > 3) throw MeasureError("discrete directions need d in {2, 3}");
  if (atoms.empty()) throw MeasureError("degenerate directional distribution");
  double total = 0.0;
  for (DirectionAtom& a : atoms) {
    if (!(a.weight > 0.0)) throw MeasureError("discrete weights must be positive");
    if (std::abs(a.normal.norm() - 1.0) > kUnitTol) throw MeasureError("normals must have unit norm");
    for (int i = dim; i < 3; ++i)
      if (a.normal[i] != 0.0) throw MeasureError("normal has coordinates beyond the dimension");
    a.normal = canonical_normal(a.normal, dim);
    total += a.weight;
  }
  if (std::abs(total - 1.0) > kUnitTol) throw MeasureError("discrete weights must sum to 1");
  DirectionalDistribution q;
  q.dim_ = dim;
  q.kind_ = DirectionKind::discrete;
  q.atoms_ = std::move(atoms);
  if (!q.non_degenerate()) throw MeasureError("degenerate directional distribution");
  return q;
}

bool DirectionalDistribution::non_degenerate() const {
  if (kind_ != DirectionKind::discrete) return true;
  Eigen::MatrixXd m(atoms_.size(), dim_);
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    for (int j = 0; j < dim_; ++j) m(static_cast<Eigen::Index>(i), j) = atoms_[i].normal[j];
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  lu.setThreshold(1e-10);
  return lu.rank() == dim_;
}

std::string DirectionalDistribution::describe() const {
  switch (kind_) {
    case DirectionKind::isotropic:
      return "isotropic";
    case DirectionKind::axis_aligned:
      return "axis";
    case DirectionKind::discrete: {
      std::ostringstream os;
      os.precision(17);
      os << "discrete:[";
      for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (i) os << ",";
        os << "((";
        for (int j = 0; j < dim_; ++j) os << (j ? "," : "") << atoms_[i].normal[j];
        os << ")," << atoms_[i].weight << ")";
      }
      os << "]";
      return os.str();
    }
  }
  return "unknown";
}

DirectionalDistribution DirectionalDistribution::parse(const std::string& text, int dim) {
  if (text == "isotropic") return isotropic(dim);
  if (text == "axis" || text == "axis-aligned") return axis_aligned(dim);
  const std::string prefix = "discrete:";
  if (text.rfind(prefix, 0) != 0) throw MeasureError("unknown directional distribution '" + text + "'");
  // Extract all numbers; each atom contributes dim coordinates and a weight.
  std::vector<double> nums;
  std::string body = text.substr(prefix.size());
  for (char& ch : body)
    if (ch == '(' || ch == ')' || ch == '[' || ch == ']' || ch == ',') ch = ' ';
  std::istringstream is(body);
  double x;
  while (is >> x) nums.push_back(x);
  if (!is.eof()) throw MeasureError("malformed discrete directional distribution");
  const std::size_t stride = static_cast<std::size_t>(dim) + 1;
  if (nums.empty() || nums.size() % stride != 0)
    throw MeasureError("discrete atoms must be (normal, weight) with " + std::to_string(dim) + " coordinates");
  std::vector<DirectionAtom> atoms;
  for (std::size_t i = 0; i < nums.size(); i += stride) {
    DirectionAtom a;
    for (int j = 0; j < dim; ++j) a.normal[j] = nums[i + j];
    const double r = a.normal.norm();
    if (r > 0.0 && std::abs(r - 1.0) < 1e-6) a.normal /= r;  // tolerate rounded text
    a.weight = nums[i + dim];
    atoms.push_back(a);
  }
  return discrete(dim, std::move(atoms));
}

double lambda_of_points(const DirectionalDistribution& q, std::span<const Vec> points) {
  if (points.empty()) throw MeasureError("empty body");
  if (q.kind() != DirectionKind::isotropic) {
    double s = 0.0;
    for (const DirectionAtom& a : q.atoms()) s += a.weight * width(points, a.normal);
    return s;
  }
  if (q.dim() == 2) return hull_perimeter_2d(points) / std::numbers::pi;
  if (q.dim() != 3) throw MeasureError("isotropic hitting measure implemented for d in {2, 3}");
  if (points.size() == 1) return 0.0;
  if (points.size() == 2) return 0.5 * (points[1] - points[0]).norm();
  // Coplanar point set: mean width of a planar convex polygon is perimeter / 4.
  const Vec n = (points[1] - points[0]).cross(points[2] - points[0]);
  std::vector<Vec> local;
  const Vec e1 = (points[1] - points[0]).normalized();
  const Vec e2 = n.normalized().cross(e1);
  for (const Vec& p : points) {
    if (std::abs(n.normalized().dot(p - points[0])) > 1e-9 * (1.0 + (p - points[0]).norm()))
      throw MeasureError("isotropic hitting measure of a non-planar point set requires a polytope");
    local.emplace_back((p - points[0]).dot(e1), (p - points[0]).dot(e2), 0.0);
  }
  return hull_perimeter_2d(local) / 4.0;
}

double lambda_of_body(const DirectionalDistribution& q, const ConvexPolytope& c) {
  if (c.empty()) throw MeasureError("empty body");
  if (!q.non_degenerate()) throw MeasureError("degenerate directional distribution");
  if (q.kind() == DirectionKind::isotropic) {
    if (c.dim() == 2) {
      double per = 0.0;
      for (const Facet& f : c.facets()) per += (c.vertices()[f.cycle[1]] - c.vertices()[f.cycle[0]]).norm();
      return per / std::numbers::pi;
    }
    return mean_width_polyhedron(c);
  }
  return lambda_of_points(q, c.vertices());
}

double lambda_of_segment(const DirectionalDistribution& q, const Vec& u) {
  const Vec pts[2] = {Vec::Zero(), u};
  return lambda_of_points(q, pts);
}

double lambda_isotropic_quadrature(const ConvexPolytope& c, int nodes) {
  const GaussLegendre gl(nodes);
  if (c.dim() == 2) {
    // Mean of width over θ in [0, π); 16 panels.
    const int panels = 16;
    const double h = std::numbers::pi / panels;
    double s = 0.0;
    for (int p = 0; p < panels; ++p)
      s += gl.integrate(p * h, (p + 1) * h, [&](double th) {
        return width(c, Vec(std::cos(th), std::sin(th), 0.0));
      });
    return s / std::numbers::pi;
  }
  // Upper hemisphere: (1/2π) ∫_0^{2π} ∫_0^{π/2} w(φ, θ) sin φ dφ dθ, paneled
  // because the width has kinks.
  const int pt = 16, pp = 8;
  const double ht = 2.0 * std::numbers::pi / pt, hp = std::numbers::pi / 2 / pp;
  double s = 0.0;
  for (int a = 0; a < pt; ++a)
    s += gl.integrate(a * ht, (a + 1) * ht, [&](double th) {
      double inner = 0.0;
      for (int b = 0; b < pp; ++b)
        inner += gl.integrate(b * hp, (b + 1) * hp, [&](double ph) {
          const Vec n(std::sin(ph) * std::cos(th), std::sin(ph) * std::sin(th), std::cos(ph));
          return width(c, n) * std::sin(ph);
        });
      return inner;
    });
  return s / (2.0 * std::numbers::pi);
}

Hyperplane sample_hitting_hyperplane(const DirectionalDistribution& q, const ConvexPolytope& c, Stream& rng) {
  if (c.empty()) throw MeasureError("empty body");
  if (!(c.volume() > 0.0)) throw MeasureError("degenerate cell");
  const int dim = c.dim();
  for (int attempt = 0; attempt < 64; ++attempt) {
    Vec n;
    if (q.kind() == DirectionKind::isotropic) {
      const double envelope = c.diameter();
      for (;;) {
        n = canonical_normal(random_unit(dim, rng), dim);
        if (rng.uniform() * envelope <= width(c, n)) break;
      }
    } else {
      const auto& atoms = q.atoms();
      std::vector<double> cum(atoms.size());
      double total = 0.0;
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        total += atoms[i].weight * width(c, atoms[i].normal);
        cum[i] = total;
      }
      const double u = rng.uniform() * total;
      std::size_t k = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
      n = atoms[std::min(k, atoms.size() - 1)].normal;
    }
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const Vec& v : c.vertices()) {
      lo = std::min(lo, v.dot(n));
      hi = std::max(hi, v.dot(n));
    }
    Hyperplane h;
    h.normal = n;
    h.offset = lo + rng.uniform() * (hi - lo);
    if (splits(c, h)) return h;
  }
  throw MeasureError("degenerate cell: no splitting hyperplane found");
}

}  // namespace stit

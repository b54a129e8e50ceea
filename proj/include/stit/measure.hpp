#pragma once

// Translation-invariant hyperplane measure Λ, represented through its
// directional distribution Q on unit normals in the upper half-sphere.
//
//   Λ(<c>) = ∫ width(c, n) Q(dn)
//
// and the splitting hyperplane of a cell c is drawn from Λ(· | <c>): the
// normal with density proportional to width(c, ·) w.r.t. Q, the offset
// uniform over the width interval.

#include "stit/geometry.hpp"
#include "stit/rng.hpp"

#include <string>
#include <vector>

namespace stit {

enum class DirectionKind { isotropic, axis_aligned, discrete };

struct DirectionAtom {
  Vec normal = Vec::Zero();
  double weight = 0.0;
};

class MeasureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DirectionalDistribution {
 public:
  static DirectionalDistribution isotropic(int dim);
  static DirectionalDistribution axis_aligned(int dim);
  // Validates weights, unit norms, and non-degeneracy. Normals are
  // canonicalized to the upper half-sphere.
  static DirectionalDistribution discrete(int dim, std::vector<DirectionAtom> atoms);

  // "isotropic" | "axis" | "discrete:[(n1,w1),(n2,w2),...]" with each n a
  // comma-separated coordinate list in parentheses, e.g.
  // discrete:[((1,0),0.5),((0,1),0.5)].
  static DirectionalDistribution parse(const std::string& text, int dim);

  int dim() const { return dim_; }
  DirectionKind kind() const { return kind_; }
  // Atoms for axis-aligned and discrete kinds (empty for isotropic).
  const std::vector<DirectionAtom>& atoms() const { return atoms_; }
  bool non_degenerate() const;
  std::string describe() const;

 private:
  int dim_ = 2;
  DirectionKind kind_ = DirectionKind::isotropic;
  std::vector<DirectionAtom> atoms_;
};

// Canonical upper half-sphere representative: last nonzero coordinate
// positive; on the equator the first nonzero coordinate decides.
Vec canonical_normal(const Vec& n, int dim);

// Λ(<K>) for the convex hull K of the given points.
double lambda_of_points(const DirectionalDistribution& q, std::span<const Vec> points);
double lambda_of_body(const DirectionalDistribution& q, const ConvexPolytope& c);
// Λ(<u>) for the segment [o, u]; the line-section intensity per unit time.
double lambda_of_segment(const DirectionalDistribution& q, const Vec& u);

// Isotropic Λ(<c>) by direct angular Gauss-Legendre quadrature over the
// half-sphere (d=2: panels x nodes on [0, π); d=3: product rule). Slower
// than lambda_of_body; used as an independent cross-check.
double lambda_isotropic_quadrature(const ConvexPolytope& c, int nodes);

Hyperplane sample_hitting_hyperplane(const DirectionalDistribution& q, const ConvexPolytope& c, Stream& rng);

}  // namespace stit

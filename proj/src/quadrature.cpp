#include "stit/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace stit {

GaussLegendre::GaussLegendre(int n) {
  if (n < 1) throw std::invalid_argument("Gauss-Legendre rule needs at least one node");
  nodes_.resize(n);
  weights_.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = 0.0;
    for (int j = 1; j <= n; ++j) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
    }
    dp = n * (z * p0 - p1) / (z * z - 1.0);
    nodes_[i] = -z;
    nodes_[n - 1 - i] = z;
    weights_[i] = weights_[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

std::vector<QuadPoint> composite_rule(double a, double b, int order, int panels) {
  const GaussLegendre gl(order);
  std::vector<QuadPoint> out;
  out.reserve(static_cast<std::size_t>(order) * panels);
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    for (int i = 0; i < order; ++i)
      out.push_back({lo + 0.5 * h * (gl.nodes()[i] + 1.0), 0.5 * h * gl.weights()[i]});
  }
  return out;
}

std::vector<QuadPoint> graded_rule(double length, int order, int levels) {
  const GaussLegendre gl(order);
  std::vector<QuadPoint> out;
  auto add = [&](double lo, double hi) {
    const double half = 0.5 * (hi - lo);
    for (int i = 0; i < order; ++i) out.push_back({lo + half * (gl.nodes()[i] + 1.0), half * gl.weights()[i]});
  };
  double hi = length;
  for (int l = 0; l < levels; ++l) {
    add(0.5 * hi, hi);
    hi *= 0.5;
  }
  add(0.0, hi);
  return out;
}

}  // namespace stit

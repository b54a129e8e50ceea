#pragma once

#include <cstddef>
#include <vector>

namespace stit {

// Gauss-Legendre rule with n nodes on [-1, 1]; nodes by Newton iteration on
// the Legendre recurrence.
class GaussLegendre {
 public:
  explicit GaussLegendre(int n);

  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

  template <class F>
  double integrate(double a, double b, F&& f) const {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double s = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) s += weights_[i] * f(mid + half * nodes_[i]);
    return half * s;
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

struct QuadPoint {
  double x;
  double w;
};

// Composite rule on [0, length] with panels graded geometrically towards 0:
// [0, L 2^-levels], ..., [L/4, L/2], [L/2, L], each carrying `order` nodes.
std::vector<QuadPoint> graded_rule(double length, int order, int levels);

// Plain composite rule on [a, b] with equal panels.
std::vector<QuadPoint> composite_rule(double a, double b, int order, int panels);

}  // namespace stit

#include "stit/analytic.hpp"

#include "stit/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace stit {

const char* to_string(SegmentMode mode) { return mode == SegmentMode::typical ? "typical" : "lengthweighted"; }

SegmentMode parse_segment_mode(const std::string& text) {
  if (text == "typical" || text == "0") return SegmentMode::typical;
  if (text == "lengthweighted" || text == "length-weighted" || text == "length" || text == "1")
    return SegmentMode::length_weighted;
  throw AnalyticError("unknown segment mode '" + text + "'");
}

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

void check_positive_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw AnalyticError("t must be positive and finite");
}

void check_segment_dim(int d) {
  if (d < 2) throw AnalyticError("segment laws need d >= 2");
}

// Irwin-Hall density of the sum of m independent U(0,1), m >= 1, via the
// positive recursion f_j(x) = [x f_{j-1}(x) + (j - x) f_{j-1}(x - 1)] / (j - 1).
double irwin_hall_pdf(int m, double x) {
  if (x <= 0.0 || x >= m) return 0.0;
  std::vector<double> g(m);  // g[i] = f_j(x - i)
  for (int i = 0; i < m; ++i) {
    const double y = x - i;
    g[i] = (y > 0.0 && y < 1.0) ? 1.0 : 0.0;
  }
  for (int j = 2; j <= m; ++j)
    for (int i = 0; i + j <= m; ++i) {
      const double y = x - i;
      g[i] = (y * g[i] + (j - y) * g[i + 1]) / (j - 1);
    }
  return g[0];
}

struct InnerNode {
  double sum;     // s_1 + ... + s_{d-2}
  double weight;  // Lebesgue measure carried by the node
};

void nested_nodes(const GaussLegendre& gl, int depth, double upper, double partial, double weight,
                  std::vector<InnerNode>& out) {
  if (depth == 0) {
    out.push_back({partial, weight});
    return;
  }
  for (int i = 0; i < gl.size(); ++i) {
    const double u = 0.5 * (gl.nodes()[i] + 1.0);
    const double s = upper * u;
    nested_nodes(gl, depth - 1, s, partial + s, weight * upper * 0.5 * gl.weights()[i], out);
  }
}

// Nodes for ∫_{0 < s_1 < ... < s_m < σ} h(s_1 + ... + s_m) ds, m = d - 2.
std::vector<InnerNode> inner_nodes(int m, double sigma, const GaussLegendre& gl, InternalRoute route) {
  std::vector<InnerNode> out;
  if (m == 0) {
    out.push_back({0.0, 1.0});
    return out;
  }
  if (route == InternalRoute::nested) {
    nested_nodes(gl, m, sigma, 0.0, 1.0, out);
    return out;
  }
  // σ^m / m! E h(σ S_m), S_m Irwin-Hall; its density is polynomial on each unit cell
  const double scale = std::pow(sigma, m) / factorial(m);
  for (int cell = 0; cell < m; ++cell)
    for (int i = 0; i < gl.size(); ++i) {
      const double x = cell + 0.5 * (gl.nodes()[i] + 1.0);
      out.push_back({sigma * x, scale * 0.5 * gl.weights()[i] * irwin_hall_pdf(m, x)});
    }
  return out;
}

}  // namespace

void BirthTimeLaw::validate() const {
  if (d < 1) throw AnalyticError("d must be >= 1");
  if (k < 0 || k > d - 1) throw AnalyticError("k must lie in {0, ..., d-1}");
  if (j < 0 || j > k) throw AnalyticError("j must lie in {0, ..., k}");
  check_positive_time(t);
}

double birth_time_density(const BirthTimeLaw& law, std::span<const double> s) {
  law.validate();
  if (static_cast<int>(s.size()) != law.d - law.k) throw AnalyticError("birth-time vector must have d - k entries");
  double prev = 0.0;
  for (double x : s) {
    if (!(x > prev)) return 0.0;
    prev = x;
  }
  if (!(prev < law.t)) return 0.0;
  return (law.d - law.j) * factorial(law.d - law.k - 1) * std::pow(prev, law.k - law.j) /
         std::pow(law.t, law.d - law.j);
}

double last_birth_time_density(int d, int j, double t, double s) {
  check_positive_time(t);
  if (j < 0 || j >= d) throw AnalyticError("need 0 <= j < d");
  if (!(s > 0.0 && s < t)) return 0.0;
  return (d - j) * std::pow(s, d - j - 1) / std::pow(t, d - j);
}

double last_birth_time_cdf(int d, int j, double t, double s) {
  check_positive_time(t);
  if (j < 0 || j >= d) throw AnalyticError("need 0 <= j < d");
  if (s <= 0.0) return 0.0;
  if (s >= t) return 1.0;
  return std::pow(s / t, d - j);
}

double p_n_given_birth_times(int d, SegmentMode mode, int n, std::span<const double> s, double t) {
  check_segment_dim(d);
  check_positive_time(t);
  if (static_cast<int>(s.size()) != d - 1) throw AnalyticError("birth-time vector must have d - 1 entries");
  if (n < 0) return 0.0;
  double prev = 0.0;
  for (double x : s) {
    if (!(x > prev)) throw AnalyticError("birth times must be strictly increasing and positive");
    prev = x;
  }
  if (prev > t) throw AnalyticError("birth times must not exceed t");
  const double sigma = s.back();
  double a = d * t - 2.0 * sigma;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) a -= s[i];
  const double b = sigma + a;
  const double r = a / b;
  const double q = sigma / b;
  const double rn = n == 0 ? 1.0 : std::pow(r, n);
  return mode == SegmentMode::typical ? q * rn : (n + 1.0) * q * q * rn;
}

InternalVertexSeries p_internal_series(int d, SegmentMode mode, int n_max, double t, const QuadratureOptions& opts) {
  check_segment_dim(d);
  check_positive_time(t);
  if (n_max < 0) throw AnalyticError("n_max must be >= 0");
  InternalRoute route = opts.route;
  if (route == InternalRoute::automatic) route = d <= 4 ? InternalRoute::nested : InternalRoute::irwin_hall;

  const int m = d - 2;
  const GaussLegendre gl(opts.order);
  const auto outer = graded_rule(t, opts.order, opts.levels);
  const bool typical = mode == SegmentMode::typical;
  const double prefactor =
      typical ? d * factorial(d - 2) / std::pow(t, d) : factorial(d - 1) / std::pow(t, d - 1);

  InternalVertexSeries out;
  out.p.assign(n_max + 1, 0.0);
  const double big_m = n_max + 1.0;  // tail starts here
  for (const QuadPoint& sp : outer) {
    const double sigma = sp.x;
    for (const InnerNode& in : inner_nodes(m, sigma, gl, route)) {
      const double a = d * t - 2.0 * sigma - in.sum;
      const double b = a + sigma;
      const double r = a / b;
      const double q = sigma / b;  // 1 - r
      const double base = prefactor * sigma * sigma * sp.w * in.weight / (typical ? b : b * b);
      double pow_r = 1.0;
      for (int n = 0; n <= n_max; ++n) {
        out.p[n] += base * (typical ? pow_r : (n + 1.0) * pow_r);
        pow_r *= r;
      }
      // pow_r = r^(n_max+1)
      const double s0 = 1.0 / q;
      const double s1 = r / (q * q);
      if (typical) {
        out.mass_tail += base * pow_r * s0;
        out.mean_tail += base * pow_r * (big_m * s0 + s1);
      } else {
        const double s2 = r * (1.0 + r) / (q * q * q);
        out.mass_tail += base * pow_r * (s1 + (big_m + 1.0) * s0);
        out.mean_tail += base * pow_r * (s2 + (2.0 * big_m + 1.0) * s1 + big_m * (big_m + 1.0) * s0);
      }
    }
  }
  for (int n = 0; n <= n_max; ++n) {
    out.mass += out.p[n];
    out.mean_head += n * out.p[n];
  }
  if (std::isinf(mean_internal(d, mode))) out.mean_tail = std::numeric_limits<double>::infinity();
  return out;
}

double p_internal(int d, SegmentMode mode, int n, double t, const QuadratureOptions& opts) {
  if (n < 0) throw AnalyticError("n must be >= 0");
  return p_internal_series(d, mode, n, t, opts).p[n];
}

double mean_internal(int d, SegmentMode mode) {
  check_segment_dim(d);
  if (mode == SegmentMode::typical) return 0.5 * (d * d - d + 2.0) / (d - 1.0);
  if (d == 2) return std::numeric_limits<double>::infinity();
  return (d * d - 2.0 * d + 4.0) / (d - 2.0);
}

std::optional<ExactValue> exact_p_internal(int d, SegmentMode mode, int n) {
  const double ln2 = std::numbers::ln2;
  const double ln3 = std::log(3.0);
  if (d == 2 && mode == SegmentMode::typical && n == 0) return ExactValue{"8 ln 2 - 5", 8.0 * ln2 - 5.0};
  if (d == 3 && mode == SegmentMode::length_weighted && n == 0)
    return ExactValue{"5 + 18 ln 2 - 63/4 ln 3", 5.0 + 18.0 * ln2 - 63.0 / 4.0 * ln3};
  if (d == 3 && mode == SegmentMode::length_weighted && n == 1)
    return ExactValue{"28 + 90 ln 2 - 657/8 ln 3", 28.0 + 90.0 * ln2 - 657.0 / 8.0 * ln3};
  return std::nullopt;
}

double segment_length_density(double lambda_u, double s, SegmentMode mode, double x) {
  if (!(lambda_u > 0.0) || !(s > 0.0)) throw AnalyticError("rate parameters must be positive");
  if (x < 0.0) return 0.0;
  const double rate = lambda_u * s;
  return mode == SegmentMode::typical ? rate * std::exp(-rate * x) : rate * rate * x * std::exp(-rate * x);
}

double segment_length_cdf(double lambda_u, double s, SegmentMode mode, double x) {
  if (!(lambda_u > 0.0) || !(s > 0.0)) throw AnalyticError("rate parameters must be positive");
  if (x <= 0.0) return 0.0;
  const double y = lambda_u * s * x;
  return mode == SegmentMode::typical ? -std::expm1(-y) : -std::expm1(-y) - y * std::exp(-y);
}

namespace {

SegmentMode mode_of(int j) {
  if (j != 0 && j != 1) throw AnalyticError("segment weighting j must be 0 or 1");
  return j == 0 ? SegmentMode::typical : SegmentMode::length_weighted;
}

const std::vector<QuadPoint>& mixture_rule() {
  static const std::vector<QuadPoint> rule = graded_rule(1.0, 24, 30);
  return rule;
}

template <class F>
double mix(int d, int j, double t, F&& inner) {
  check_segment_dim(d);
  check_positive_time(t);
  double sum = 0.0;
  for (const QuadPoint& p : mixture_rule()) {
    const double s = p.x * t;
    sum += p.w * t * last_birth_time_density(d, j, t, s) * inner(s);
  }
  return sum;
}

}  // namespace

double mixture_length_density(int d, int j, double t, double lambda_u, double x) {
  const SegmentMode mode = mode_of(j);
  return mix(d, j, t, [&](double s) { return segment_length_density(lambda_u, s, mode, x); });
}

double mixture_length_cdf(int d, int j, double t, double lambda_u, double x) {
  const SegmentMode mode = mode_of(j);
  if (x <= 0.0) return 0.0;
  return std::min(1.0, mix(d, j, t, [&](double s) { return segment_length_cdf(lambda_u, s, mode, x); }));
}

double mixture_length_moment(int d, int j, double t, double lambda_u, double p) {
  mode_of(j);
  check_segment_dim(d);
  check_positive_time(t);
  if (!(lambda_u > 0.0)) throw AnalyticError("rate parameters must be positive");
  // E[ℓ^p | s] = Γ(p+1+j)/Γ(1+j) (λ s)^-p, integrable against s^{d-j-1} iff p < d - j
  if (p >= d - j) return std::numeric_limits<double>::infinity();
  const double conditional = std::tgamma(p + 1.0 + j) / std::tgamma(1.0 + j) * std::pow(lambda_u, -p);
  return mix(d, j, t, [&](double s) { return conditional * std::pow(s, -p); });
}

double mixture_check(int d, int j, double t, double lambda_u, const MixtureStatistic& f) {
  return f.kind == MixtureStatistic::Kind::moment ? mixture_length_moment(d, j, t, lambda_u, f.argument)
                                                  : mixture_length_cdf(d, j, t, lambda_u, f.argument);
}

InclusionWeightedCdf::InclusionWeightedCdf(std::function<double(double)> density, double a, int cells) : a_(a) {
  if (!(a > 0.0) || cells < 1) throw AnalyticError("inclusion interval must be positive");
  const GaussLegendre gl(8);
  table_.assign(cells + 1, 0.0);
  const double h = a / cells;
  for (int c = 0; c < cells; ++c) {
    const double lo = c * h;
    table_[c + 1] = table_[c] + gl.integrate(lo, lo + h, [&](double x) { return density(x) * (a - x); });
  }
  mass_ = table_.back();
  if (!(mass_ > 0.0)) throw AnalyticError("inclusion-weighted law has no mass");
  for (double& v : table_) v /= mass_;
}

double InclusionWeightedCdf::operator()(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= a_) return 1.0;
  const double pos = x / a_ * (static_cast<double>(table_.size()) - 1.0);
  const auto i = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(i);
  return table_[i] + frac * (table_[i + 1] - table_[i]);
}

}  // namespace stit

#pragma once

// Distributional formulas for maximal polytopes of a STIT tessellation:
// joint birth-time densities, internal-vertex probabilities of the typical and
// length-weighted typical maximal segment, conditional segment-length laws,
// and the last-birth-time mixture over Poisson hyperplane edge laws.
//
// Nothing here takes a directional distribution: the birth-time and
// internal-vertex laws do not depend on it, and length laws only through the
// scalar Λ(<u>).

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace stit {

enum class SegmentMode { typical = 0, length_weighted = 1 };

const char* to_string(SegmentMode mode);
SegmentMode parse_segment_mode(const std::string& text);

class AnalyticError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct BirthTimeLaw {
  int d = 2;
  int k = 1;
  int j = 0;
  double t = 1.0;

  void validate() const;  // throws AnalyticError
};

// (d-j)(d-k-1)! s_{d-k}^{k-j} / t^{d-j} on 0 < s_1 < ... < s_{d-k} < t.
double birth_time_density(const BirthTimeLaw& law, std::span<const double> s);

// (d-j) s^{d-j-1} / t^{d-j} on (0, t).
double last_birth_time_density(int d, int j, double t, double s);
double last_birth_time_cdf(int d, int j, double t, double s);

// P(N = n | birth times s_1 < ... < s_{d-1}) with
// A = d t - 2 s_{d-1} - s_{d-2} - ... - s_1, σ = s_{d-1}:
//   typical:          σ A^n / (σ + A)^{n+1}
//   length-weighted:  (n+1) σ² A^n / (σ + A)^{n+2}
double p_n_given_birth_times(int d, SegmentMode mode, int n, std::span<const double> s, double t);

enum class InternalRoute {
  automatic,   // nested for d <= 4, irwin_hall above
  nested,      // iterated Gauss-Legendre over s_i = s_{i+1} u_i
  irwin_hall,  // inner sum of d-2 ordered times via the Irwin-Hall law
};

struct QuadratureOptions {
  int order = 32;   // nodes per panel and per inner axis
  int levels = 16;  // geometric grading of the outer axis towards 0
  InternalRoute route = InternalRoute::automatic;
};

struct InternalVertexSeries {
  std::vector<double> p;   // p[0..n_max]
  double mass = 0.0;       // Σ p
  double mean_head = 0.0;  // Σ n p(n), n <= n_max
  double mean_tail = 0.0;  // Σ_{n > n_max} n p(n), closed-form geometric tail
  double mass_tail = 0.0;  // Σ_{n > n_max} p(n)
};

InternalVertexSeries p_internal_series(int d, SegmentMode mode, int n_max, double t,
                                       const QuadratureOptions& opts = {});
double p_internal(int d, SegmentMode mode, int n, double t = 1.0, const QuadratureOptions& opts = {});

// Closed forms; +infinity for the length-weighted mode at d = 2.
double mean_internal(int d, SegmentMode mode);

struct ExactValue {
  std::string expression;
  double value;
};
// Known symbolic values (d = 2 typical n = 0; d = 3 length-weighted n = 0, 1).
std::optional<ExactValue> exact_p_internal(int d, SegmentMode mode, int n);

// Length of the typical (exponential, rate λs) or length-weighted
// (Erlang(2, λs)) Poisson hyperplane edge.
double segment_length_density(double lambda_u, double s, SegmentMode mode, double x);
double segment_length_cdf(double lambda_u, double s, SegmentMode mode, double x);

// Mixture of the edge law of PHT(s) against the last-birth-time density.
double mixture_length_density(int d, int j, double t, double lambda_u, double x);
double mixture_length_cdf(int d, int j, double t, double lambda_u, double x);
// E ℓ^p under the mixture; +infinity when the s-integral diverges (p >= d - j).
double mixture_length_moment(int d, int j, double t, double lambda_u, double p);

struct MixtureStatistic {
  enum class Kind { moment, cdf } kind = Kind::moment;
  double argument = 1.0;  // moment order or CDF abscissa
};
double mixture_check(int d, int j, double t, double lambda_u, const MixtureStatistic& f);

// CDF of the law with density ∝ g(x) (a - x) on (0, a): what a length law g
// looks like after keeping only segments that fit inside an interval of
// length a. Tabulated on `cells` equal cells, linear in between.
class InclusionWeightedCdf {
 public:
  InclusionWeightedCdf(std::function<double(double)> density, double a, int cells = 4096);
  double operator()(double x) const;
  double mass() const { return mass_; }  // ∫ g(x)(a - x) dx before normalization

 private:
  double a_;
  double mass_ = 0.0;
  std::vector<double> table_;
};

}  // namespace stit

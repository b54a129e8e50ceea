#include "stit/analytic.hpp"
#include "stit/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

using namespace stit;

namespace {

constexpr SegmentMode typ = SegmentMode::typical;
constexpr SegmentMode lw = SegmentMode::length_weighted;

// ∫ f over {0 < s_1 < ... < s_m < t} with an m-fold product rule on the cube
// via s_m = t v_m, s_i = s_{i+1} v_i.
double simplex_integral(int m, double t, const std::function<double(const std::vector<double>&)>& f, int nodes = 40) {
  const GaussLegendre gl(nodes);
  std::vector<double> s(m);
  std::function<double(int, double)> rec = [&](int i, double upper) -> double {
    if (i < 0) return f(s);
    return gl.integrate(0.0, upper, [&](double x) {
      s[i] = x;
      return rec(i - 1, x);
    });
  };
  return rec(m - 1, t);
}

// The internal-vertex probability straight from the conditional law, with a
// plain product rule; no series bookkeeping.
double p_direct(int d, SegmentMode mode, int n, double t) {
  const BirthTimeLaw law{d, 1, mode == typ ? 0 : 1, t};
  return simplex_integral(d - 1, t, [&](const std::vector<double>& s) {
    return birth_time_density(law, s) * p_n_given_birth_times(d, mode, n, s, t);
  }, 48);
}

}  // namespace

TEST_CASE("birth-time density examples") {
  const std::vector<double> a{0.2, 0.7};
  CHECK(birth_time_density({3, 1, 1, 1.0}, a) == doctest::Approx(2.0));
  const std::vector<double> b{0.5};
  CHECK(birth_time_density({2, 1, 0, 1.0}, b) == doctest::Approx(1.0));
  const std::vector<double> outside{0.7, 0.2};
  CHECK(birth_time_density({3, 1, 1, 1.0}, outside) == 0.0);
  const std::vector<double> late{0.2, 1.2};
  CHECK(birth_time_density({3, 1, 1, 1.0}, late) == 0.0);
}

TEST_CASE("birth-time densities integrate to one") {
  struct Law {
    int d, k, j;
  };
  for (const Law l : {Law{2, 1, 0}, Law{2, 1, 1}, Law{3, 1, 0}, Law{3, 1, 1}, Law{3, 2, 0}, Law{3, 2, 2},
                      Law{4, 1, 0}, Law{4, 1, 1}, Law{4, 2, 1}, Law{4, 2, 2}}) {
    CAPTURE(l.d);
    CAPTURE(l.k);
    CAPTURE(l.j);
    const BirthTimeLaw law{l.d, l.k, l.j, 2.5};
    const double mass = simplex_integral(l.d - l.k, 2.5, [&](const std::vector<double>& s) { return birth_time_density(law, s); });
    CHECK(std::abs(mass - 1.0) < 1e-8);
  }
}

TEST_CASE("last birth time") {
  for (double s : {0.1, 0.4, 0.9}) CHECK(last_birth_time_density(2, 1, 1.0, s) == doctest::Approx(1.0));
  CHECK(last_birth_time_density(3, 0, 1.0, 0.5) == doctest::Approx(0.75));
  CHECK(last_birth_time_cdf(3, 0, 2.0, 1.0) == doctest::Approx(0.125));
  CHECK(last_birth_time_cdf(3, 1, 2.0, 3.0) == 1.0);

  // marginal of the joint density in the last coordinate
  for (int d : {3, 4})
    for (int j : {0, 1}) {
      const double t = 1.7;
      const BirthTimeLaw law{d, 1, j, t};
      for (double last : {0.1, 0.55, 1.3, 1.69}) {
        const double marginal = simplex_integral(d - 2, last, [&](const std::vector<double>& s) {
          std::vector<double> full = s;
          full.push_back(last);
          return birth_time_density(law, full);
        });
        CHECK(std::abs(marginal - last_birth_time_density(d, j, t, last)) < 1e-8);
      }
    }
}

TEST_CASE("conditional internal-vertex law") {
  const std::vector<double> born_at_horizon{1.0};
  CHECK(p_n_given_birth_times(2, typ, 0, born_at_horizon, 1.0) == doctest::Approx(1.0));
  CHECK(p_n_given_birth_times(2, typ, 1, born_at_horizon, 1.0) == 0.0);

  for (int d : {2, 3, 4})
    for (SegmentMode mode : {typ, lw}) {
      std::vector<double> s;
      for (int i = 1; i < d; ++i) s.push_back(0.25 * i);
      double total = 0.0;
      for (int n = 0; n <= 200; ++n) total += p_n_given_birth_times(d, mode, n, s, 1.0);
      CHECK(std::abs(total - 1.0) < 1e-10);
    }
  const std::vector<double> bad{0.5, 0.3};
  CHECK_THROWS_AS(p_n_given_birth_times(3, typ, 0, bad, 1.0), AnalyticError);
}

TEST_CASE("internal-vertex probabilities: closed forms") {
  CHECK(p_internal(3, lw, 0) == doctest::Approx(5.0 + 18.0 * std::log(2.0) - 63.0 / 4.0 * std::log(3.0)).epsilon(1e-10));
  CHECK(p_internal(3, lw, 1) == doctest::Approx(28.0 + 90.0 * std::log(2.0) - 657.0 / 8.0 * std::log(3.0)).epsilon(1e-10));
  CHECK(std::abs(p_internal(3, lw, 0) - 0.173506) < 5e-7);
  CHECK(std::abs(p_internal(3, lw, 1) - 0.159712) < 5e-7);

  // 2 ∫_0^1 s² / (2 - s) ds, reduced by hand to 8 ln 2 - 5
  const GaussLegendre gl(40);
  const double oracle = 2.0 * gl.integrate(0.0, 1.0, [](double s) { return s * s / (2.0 - s); });
  CHECK(oracle == doctest::Approx(8.0 * std::numbers::ln2 - 5.0).epsilon(1e-12));
  CHECK(p_internal(2, typ, 0) == doctest::Approx(oracle).epsilon(1e-10));
  CHECK(std::abs(p_internal(2, typ, 0) - 0.545177) < 5e-7);

  for (auto [d, mode, n] : {std::tuple{2, typ, 0}, std::tuple{3, lw, 0}, std::tuple{3, lw, 1}}) {
    const auto e = exact_p_internal(d, mode, n);
    REQUIRE(e.has_value());
    CHECK(e->value == doctest::Approx(p_internal(d, mode, n)).epsilon(1e-10));
  }
  CHECK_FALSE(exact_p_internal(3, typ, 0).has_value());
}

TEST_CASE("internal-vertex probabilities agree with a direct product-rule integral") {
  for (int d : {2, 3})
    for (SegmentMode mode : {typ, lw})
      for (int n : {0, 1, 2, 5}) {
        CAPTURE(d);
        CAPTURE(n);
        CHECK(std::abs(p_internal(d, mode, n) - p_direct(d, mode, n, 1.0)) < 1e-7);
      }
}

TEST_CASE("internal-vertex law does not depend on t or on the quadrature order") {
  for (int d : {2, 3, 4})
    for (SegmentMode mode : {typ, lw})
      for (int n : {0, 1, 3}) {
        CAPTURE(d);
        CAPTURE(n);
        const double base = p_internal(d, mode, n, 1.0);
        CHECK(std::abs(p_internal(d, mode, n, 7.0) - base) < 1e-9);
        CHECK(std::abs(p_internal(d, mode, n, 1.0, {64, 16, InternalRoute::automatic}) - base) < 1e-8);
      }
}

TEST_CASE("inner integration routes agree") {
  for (int d : {4, 5})
    for (SegmentMode mode : {typ, lw})
      for (int n : {0, 2}) {
        const double nested = p_internal(d, mode, n, 1.0, {32, 16, InternalRoute::nested});
        const double ih = p_internal(d, mode, n, 1.0, {32, 16, InternalRoute::irwin_hall});
        CHECK(std::abs(nested - ih) < 1e-7);
      }
}

TEST_CASE("series mass and means") {
  for (int d : {2, 3})
    for (SegmentMode mode : {typ, lw}) {
      CAPTURE(d);
      const auto s = p_internal_series(d, mode, 500, 1.0);
      CHECK(s.mass + s.mass_tail == doctest::Approx(1.0).epsilon(1e-7));
      if (d == 2 && mode == lw) {
        // heavy tail: P(N > n) decays like 1/n
        CHECK(s.mass_tail > 1e-3);
        CHECK(std::isinf(s.mean_tail));
      } else {
        CHECK(s.mass >= 1.0 - 1e-3);
      }
    }
  CHECK(mean_internal(2, typ) == 2.0);
  CHECK(mean_internal(3, typ) == 2.0);
  CHECK(mean_internal(3, lw) == 7.0);
  CHECK(mean_internal(4, lw) == 6.0);
  CHECK(std::isinf(mean_internal(2, lw)));
  for (auto [d, mode] : {std::pair{2, typ}, std::pair{3, typ}, std::pair{3, lw}, std::pair{4, lw}}) {
    const auto s = p_internal_series(d, mode, 500, 1.0);
    CHECK(std::abs(s.mean_head + s.mean_tail - mean_internal(d, mode)) < 1e-3);
  }
}

TEST_CASE("invalid arguments") {
  CHECK_THROWS_AS(BirthTimeLaw({3, 3, 0, 1.0}).validate(), AnalyticError);
  CHECK_THROWS_AS(BirthTimeLaw({3, 1, 2, 1.0}).validate(), AnalyticError);
  CHECK_THROWS_AS(BirthTimeLaw({3, 1, 0, 0.0}).validate(), AnalyticError);
  CHECK_THROWS_AS(BirthTimeLaw({1, 1, 0, 1.0}).validate(), AnalyticError);
  CHECK_THROWS_AS(p_internal(1, typ, 0), AnalyticError);
  CHECK_THROWS_AS(p_internal(3, typ, -1), AnalyticError);
  CHECK_THROWS_AS(parse_segment_mode("sideways"), AnalyticError);
}

TEST_CASE("segment length laws") {
  const GaussLegendre gl(32);
  for (SegmentMode mode : {typ, lw}) {
    double mass = 0.0, mean = 0.0;
    for (int p = 0; p < 200; ++p) {
      const double a = 0.5 * p, b = a + 0.5;
      mass += gl.integrate(a, b, [&](double x) { return segment_length_density(0.5, 1.3, mode, x); });
      mean += gl.integrate(a, b, [&](double x) { return x * segment_length_density(0.5, 1.3, mode, x); });
    }
    CHECK(std::abs(mass - 1.0) < 1e-10);
    CHECK(mean == doctest::Approx(mode == lw ? 2.0 / (0.5 * 1.3) : 1.0 / (0.5 * 1.3)).epsilon(1e-9));
    CHECK(segment_length_cdf(0.5, 1.3, mode, 3.0) ==
          doctest::Approx(gl.integrate(0.0, 3.0, [&](double x) { return segment_length_density(0.5, 1.3, mode, x); })));
  }
  // x e^{-x/2} peaks at 2
  const double f2 = segment_length_density(0.5, 1.0, lw, 2.0);
  CHECK(f2 > segment_length_density(0.5, 1.0, lw, 1.99));
  CHECK(f2 > segment_length_density(0.5, 1.0, lw, 2.01));
}

TEST_CASE("mixture of edge laws over the last birth time") {
  const double lam = 0.5;
  // CDF monotone from 0 towards 1
  double prev = 0.0;
  CHECK(mixture_length_cdf(2, 1, 1.0, lam, 0.0) == 0.0);
  for (double x : {0.1, 1.0, 5.0, 20.0, 100.0, 1e3}) {
    const double F = mixture_length_cdf(2, 1, 1.0, lam, x);
    CHECK(F >= prev);
    prev = F;
  }
  CHECK(mixture_length_cdf(2, 1, 1.0, lam, 1e7) > 1.0 - 1e-5);
  CHECK(std::isinf(mixture_length_moment(2, 1, 1.0, lam, 1.0)));
  CHECK(std::isinf(mixture_check(2, 1, 1.0, lam, {MixtureStatistic::Kind::moment, 1.0})));

  // d = 3, j = 1: E ℓ = ∫ (2 s / t²) 2 / (λ s) ds = 4 / (λ t)
  CHECK(mixture_length_moment(3, 1, 2.0, lam, 1.0) == doctest::Approx(4.0 / (lam * 2.0)).epsilon(1e-8));

  // density against a plain composite rule over s
  const GaussLegendre gl(20);
  for (int j : {0, 1})
    for (double x : {0.3, 2.0, 9.0}) {
      double oracle = 0.0;
      for (int p = 0; p < 400; ++p) {
        const double a = p / 400.0, b = (p + 1) / 400.0;
        oracle += gl.integrate(a, b, [&](double s) {
          return last_birth_time_density(3, j, 1.0, s) * segment_length_density(lam, s, SegmentMode(j), x);
        });
      }
      CHECK(mixture_length_density(3, j, 1.0, lam, x) == doctest::Approx(oracle).epsilon(1e-7));
    }
  CHECK(mixture_check(3, 1, 1.0, lam, {MixtureStatistic::Kind::cdf, 2.0}) ==
        doctest::Approx(mixture_length_cdf(3, 1, 1.0, lam, 2.0)));
}

TEST_CASE("inclusion-weighted CDF") {
  // uniform length law on (0, 1) kept inside an interval of length 1: density 2(1 - x)
  const InclusionWeightedCdf F([](double x) { return x < 1.0 ? 1.0 : 0.0; }, 1.0);
  for (double x : {0.1, 0.5, 0.9}) CHECK(F(x) == doctest::Approx(1.0 - (1.0 - x) * (1.0 - x)).epsilon(1e-6));
  CHECK(F(-1.0) == 0.0);
  CHECK(F(2.0) == 1.0);
  CHECK(F.mass() == doctest::Approx(0.5).epsilon(1e-6));
}

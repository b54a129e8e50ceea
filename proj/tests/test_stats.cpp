#include "fixtures.hpp"
#include "stit/extract.hpp"
#include "stit/stats.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace stit;

namespace {

std::vector<RatioTerm> synthetic_terms(std::size_t n, std::uint64_t seed) {
  Stream rng(StreamKey::root(seed, 0));
  std::vector<RatioTerm> out;
  for (std::size_t i = 0; i < n; ++i) {
    RatioTerm r;
    const int k = 5 + static_cast<int>(rng.poisson(10.0));
    for (int j = 0; j < k; ++j) {
      const double w = rng.exponential(1.0);
      r.denominator += w;
      r.numerator += w * (rng.uniform() < 0.3 ? 1.0 : 0.0);
      r.count += 1.0;
      r.weight_sq += w * w;
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace

TEST_CASE("compensated and order-free sums") {
  std::vector<double> xs{1e16, 1.0, -1e16, 1.0};
  CHECK(order_free_sum(xs) == 2.0);
  CompensatedSum s;
  for (double x : xs) s.add(x);
  CHECK(s.value() == 2.0);

  Stream rng(StreamKey::root(1, 0));
  std::vector<double> ys;
  for (int i = 0; i < 1000; ++i) ys.push_back(rng.normal() * std::pow(10.0, rng.uniform() * 8));
  const double a = order_free_sum(ys);
  std::mt19937_64 gen(3);
  std::shuffle(ys.begin(), ys.end(), gen);
  CHECK(order_free_sum(ys) == a);
}

TEST_CASE("parallel map keeps index order and rethrows") {
  const auto sq = parallel_map(100, 4, [](std::size_t i) { return i * i; });
  for (std::size_t i = 0; i < 100; ++i) CHECK(sq[i] == i * i);
  CHECK_THROWS_AS(parallel_map(50, 4,
                               [](std::size_t i) -> int {
                                 if (i == 17) throw std::runtime_error("boom");
                                 return 0;
                               }),
                  std::runtime_error);
}

TEST_CASE("one replicate equals the direct pipeline") {
  const McSpec spec{testing::unit_box(2), DirectionalDistribution::isotropic(2), 8.0, 1, 12, 0.15};
  const auto out = mc_run(spec, 1, [](const Tessellation& t, std::size_t) { return t.events.size(); });
  CHECK(out.at(0) == simulate_stit(spec.window, spec.q, 8.0, {12, 0}).events.size());
  CHECK_THROWS_AS(mc_run(McSpec{spec.window, spec.q, 8.0, 0, 12, 0.15}, 1,
                         [](const Tessellation&, std::size_t) { return 0; }),
                  StatsError);
  const auto threaded = mc_run(McSpec{spec.window, spec.q, 8.0, 20, 12, 0.15}, 4,
                               [](const Tessellation& t, std::size_t) { return t.events.size(); });
  const auto serial = mc_run(McSpec{spec.window, spec.q, 8.0, 20, 12, 0.15}, 1,
                             [](const Tessellation& t, std::size_t) { return t.events.size(); });
  CHECK(threaded == serial);
}

TEST_CASE("ratio estimates") {
  SUBCASE("identical replicates have zero standard error") {
    const std::vector<RatioTerm> same(10, RatioTerm{2.0, 5.0, 5.0, 5.0});
    const auto r = ratio_estimate(same, "p", "typical");
    CHECK(r.estimate == doctest::Approx(0.4));
    CHECK(r.std_error == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.ci_low <= r.estimate);
    CHECK(r.ci_high >= r.estimate);
  }
  SUBCASE("zero denominator is an error") {
    const std::vector<RatioTerm> zero(3, RatioTerm{});
    CHECK_THROWS_AS(ratio_estimate(zero, "p", "typical"), StatsError);
    CHECK_THROWS_AS(ratio_estimate(std::vector<RatioTerm>{}, "p", "typical"), StatsError);
  }
  SUBCASE("replicate order does not matter") {
    auto terms = synthetic_terms(200, 4);
    const auto a = ratio_estimate(terms, "p", "length");
    std::mt19937_64 gen(9);
    std::shuffle(terms.begin(), terms.end(), gen);
    const auto b = ratio_estimate(terms, "p", "length");
    CHECK(a.estimate == b.estimate);
    CHECK(a.std_error == b.std_error);
  }
  SUBCASE("report invariants and the square-root law") {
    const auto small = ratio_estimate(synthetic_terms(2000, 5), "p", "length");
    const auto large = ratio_estimate(synthetic_terms(4000, 6), "p", "length");
    CHECK(small.std_error >= 0.0);
    CHECK(small.effective_n <= small.raw_count);
    CHECK(small.ci_low <= small.estimate);
    CHECK(small.estimate <= small.ci_high);
    CHECK(small.std_error / large.std_error == doctest::Approx(std::sqrt(2.0)).epsilon(0.2));
  }
  SUBCASE("jackknife and bootstrap agree") {
    const auto terms = synthetic_terms(1000, 7);
    const auto r = ratio_estimate(terms, "p", "length");
    const double boot = bootstrap_stderr(terms, 500, StreamKey::root(8, 0));
    CHECK(r.std_error / boot == doctest::Approx(1.0).epsilon(0.3));
  }
}

TEST_CASE("empirical internal-vertex frequencies sum to one") {
  std::vector<RatioTerm> by_n(6);
  std::vector<std::vector<RatioTerm>> per_n(6);
  for (std::uint64_t r = 0; r < 30; ++r) {
    const auto tess = simulate_stit(testing::unit_box(2), DirectionalDistribution::isotropic(2), 15.0, {13, r});
    const auto segs = minus_sample(maximal_segments(tess), tess.window, 0.1);
    for (int n = 0; n < 6; ++n) {
      RatioTerm t;
      for (const auto& s : segs) {
        t.denominator += 1.0;
        t.count += 1.0;
        t.weight_sq += 1.0;
        t.numerator += s.internal_vertices == n || (n == 5 && s.internal_vertices > 5) ? 1.0 : 0.0;
      }
      per_n[n].push_back(t);
    }
  }
  double total = 0.0;
  for (int n = 0; n < 6; ++n) total += ratio_estimate(per_n[n], "p", "typical").estimate;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("mean estimate") {
  const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
  const auto m = mean_estimate(xs, "x");
  CHECK(m.estimate == doctest::Approx(2.5));
  CHECK(m.std_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
}

TEST_CASE("Kolmogorov distribution") {
  CHECK(kolmogorov_q(1.3581) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(kolmogorov_q(1.6276) == doctest::Approx(0.01).epsilon(1e-3));
  CHECK(kolmogorov_q(0.0) == 1.0);
}

TEST_CASE("KS calibration under the null") {
  int passes = 0;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    Stream rng(StreamKey::root(21, trial));
    std::vector<double> xs;
    for (int i = 0; i < 200; ++i) xs.push_back(rng.exponential(2.0));
    passes += gof_ks(xs, [](double x) { return x <= 0.0 ? 0.0 : 1.0 - std::exp(-2.0 * x); }).p_value > 0.01;
  }
  CHECK(passes >= 95);
}

TEST_CASE("clustered KS calibration under the null") {
  int passes = 0;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    Stream rng(StreamKey::root(22, trial));
    SamplePool pool;
    for (int c = 0; c < 100; ++c) {
      // strongly dependent within a cluster: shared offset
      const double shift = rng.uniform();
      const int k = 1 + static_cast<int>(rng.poisson(4.0));
      for (int i = 0; i < k; ++i) pool.add(std::fmod(shift + 0.1 * rng.uniform(), 1.0), 1.0 + rng.uniform());
      pool.end_cluster();
    }
    const auto r = gof_ks(pool, [](double x) { return std::clamp(x, 0.0, 1.0); });
    CHECK(r.design_effect >= 1.0);
    passes += r.p_value > 0.01;
  }
  CHECK(passes >= 95);
}

TEST_CASE("chi-square calibration and power on simplex bins") {
  // ten equal-probability bins of the triangle 0 < u1 < u2 < 1
  auto bin = [](double u1, double u2) {
    return 2.0 * std::min(4, static_cast<int>(5.0 * u2 * u2)) + (u1 / u2 < 0.5 ? 0.0 : 1.0);
  };
  const std::vector<double> probs(10, 0.1);
  int passes = 0;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    Stream rng(StreamKey::root(23, trial));
    std::vector<double> observed(10, 0.0);
    for (int i = 0; i < 1000; ++i) {
      double a = rng.uniform(), b = rng.uniform();
      if (a > b) std::swap(a, b);
      observed[static_cast<std::size_t>(bin(a, b))] += 1e-3;
    }
    passes += gof_chi2(observed, probs, 1000).p_value > 0.01;
  }
  CHECK(passes >= 95);

  // alternative: density ∝ u1 on the triangle, 10^4 points by rejection
  Stream rng(StreamKey::root(24, 0));
  SamplePool pool;
  int n = 0;
  while (n < 10000) {
    double a = rng.uniform(), b = rng.uniform();
    if (a > b) std::swap(a, b);
    if (rng.uniform() > a) continue;
    pool.add(bin(a, b));
    pool.end_cluster();
    ++n;
  }
  CHECK(gof_chi2(pool, probs).p_value < 1e-6);
}

TEST_CASE("goodness-of-fit input errors") {
  const std::vector<double> empty;
  CHECK_THROWS(gof_ks(empty, [](double x) { return x; }));
  CHECK_THROWS(gof_ks(std::vector<double>(10, 0.5), [](double x) { return x; }));
  CHECK_THROWS(gof_ks(SamplePool{}, [](double x) { return x; }));
  CHECK_THROWS(gof_ks_two_sample(empty, std::vector<double>(100, 1.0)));
  CHECK_THROWS(poisson_dispersion(empty));
}

TEST_CASE("Poisson dispersion") {
  Stream rng(StreamKey::root(25, 0));
  std::vector<double> counts;
  for (int i = 0; i < 10000; ++i) counts.push_back(static_cast<double>(rng.poisson(3.0)));
  const auto r = poisson_dispersion(counts);
  CHECK(r.statistic == doctest::Approx(1.0).epsilon(0.05));
  CHECK(r.p_value > 0.01);
  CHECK(r.p_value <= 1.0);
  std::vector<double> over;
  for (int i = 0; i < 5000; ++i) over.push_back(static_cast<double>(rng.poisson(i % 2 ? 1.0 : 5.0)));
  CHECK(poisson_dispersion(over).p_value < 1e-6);
}

TEST_CASE("two-sample KS") {
  Stream rng(StreamKey::root(26, 0));
  std::vector<double> a, b, c;
  for (int i = 0; i < 2000; ++i) {
    a.push_back(rng.normal());
    b.push_back(rng.normal());
    c.push_back(rng.normal() + 0.3);
  }
  CHECK(gof_ks_two_sample(a, b).p_value > 0.01);
  CHECK(gof_ks_two_sample(a, c).p_value < 1e-6);
}

TEST_CASE("Holm adjustment") {
  const std::vector<double> p{0.01, 0.04, 0.03, 0.005};
  const auto adj = holm_adjust(p);
  // sorted 0.005, 0.01, 0.03, 0.04 -> 0.02, 0.03, 0.06, 0.06
  CHECK(adj[3] == doctest::Approx(0.02));
  CHECK(adj[0] == doctest::Approx(0.03));
  CHECK(adj[2] == doctest::Approx(0.06));
  CHECK(adj[1] == doctest::Approx(0.06));
  const std::vector<double> big{0.5, 0.9};
  for (double x : holm_adjust(big)) CHECK(x == 1.0);
}

TEST_CASE("sample pools") {
  SamplePool a;
  a.add(1.0, 2.0);
  a.add(2.0, 2.0);
  a.end_cluster();
  SamplePool b;
  b.add(3.0);
  b.end_cluster();
  a.append(b);
  CHECK(a.size() == 3);
  CHECK(a.cluster_ends() == std::vector<std::size_t>{2, 3});
  CHECK(a.effective_size() == doctest::Approx(25.0 / 9.0));
}

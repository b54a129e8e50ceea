#pragma once

// Monte Carlo harness and the estimators / goodness-of-fit tests used to
// compare simulation with theory. Uncertainty is always computed at the
// replicate level: objects from one tessellation are dependent.

#include "stit/engine.hpp"
#include "stit/rng.hpp"

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace stit {

class StatsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + correction_; }

 private:
  double sum_ = 0.0;
  double correction_ = 0.0;
};

// Compensated sum taken in sorted order, so the result does not depend on
// the order of the inputs.
double order_free_sum(std::span<const double> xs);

// Runs fn(0), ..., fn(count-1) on up to `threads` workers and returns the
// results in index order. The first exception thrown by any task is rethrown.
template <class Fn>
auto parallel_map(std::size_t count, int threads, Fn&& fn) -> std::vector<decltype(fn(std::size_t{}))> {
  using Result = decltype(fn(std::size_t{}));
  std::vector<Result> out(count);
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads < 1 ? 1 : threads, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          out[i] = fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  pool.clear();
  if (failure) std::rethrow_exception(failure);
  return out;
}

struct McSpec {
  ConvexPolytope window;
  DirectionalDistribution q;
  double t = 1.0;
  std::size_t replicates = 1;
  std::uint64_t seed = 0;
  double margin = 0.15;
};

// Simulates replicate i with RunSeed{spec.seed, i} and hands the tessellation
// to the collector; results come back in replicate order.
template <class Collector>
auto mc_run(const McSpec& spec, int threads, Collector&& collect) {
  if (spec.replicates < 1) throw StatsError("replicates must be >= 1");
  return parallel_map(spec.replicates, threads, [&](std::size_t i) {
    const Tessellation tess = simulate_stit(spec.window, spec.q, spec.t, RunSeed{spec.seed, i});
    return collect(tess, i);
  });
}

// Per-replicate sums of one ratio estimator Σ numerator / Σ denominator.
struct RatioTerm {
  double numerator = 0.0;
  double denominator = 0.0;
  double count = 0.0;      // raw number of objects
  double weight_sq = 0.0;  // Σ w², for the effective sample size
};

struct EstimateReport {
  std::string statistic;
  std::string mode;
  double estimate = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double jackknife_corrected = 0.0;  // bias-corrected ratio
  double effective_n = 0.0;
  double raw_count = 0.0;
  std::size_t replicates = 0;
};

// Ratio of pooled sums with leave-one-replicate-out jackknife standard error
// and 95% normal interval. Throws StatsError on a zero denominator.
EstimateReport ratio_estimate(std::span<const RatioTerm> terms, std::string statistic, std::string mode);

// Standard error of the pooled ratio from `resamples` replicate-level
// bootstrap draws.
double bootstrap_stderr(std::span<const RatioTerm> terms, int resamples, StreamKey key);

// Plain mean of per-replicate values with its standard error.
EstimateReport mean_estimate(std::span<const double> values, std::string statistic);

struct GofReport {
  std::string test;
  double statistic = 0.0;
  double p_value = 1.0;
  std::string grid;
  double n = 0.0;            // sample size used for the p-value
  double design_effect = 1.0;
};

// Kolmogorov limiting survival function Q(λ) = 2 Σ (-1)^{k-1} exp(-2 k² λ²).
double kolmogorov_q(double lambda);

// Weighted observations grouped by replicate.
class SamplePool {
 public:
  void add(double value, double weight = 1.0);
  void end_cluster();  // closes the current replicate's group
  void append(const SamplePool& other);

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<std::size_t>& cluster_ends() const { return ends_; }
  double effective_size() const;  // (Σw)² / Σw²

 private:
  std::vector<double> values_;
  std::vector<double> weights_;
  std::vector<std::size_t> ends_;
};

using Cdf = std::function<double(double)>;

// One-sample KS (Stephens-corrected asymptotic p-value). Needs >= 50 points.
GofReport gof_ks(std::span<const double> sample, const Cdf& cdf);
// Weighted KS on a clustered pool: n = effective size / design effect, the
// design effect being the mean over decile points of the jackknife variance of
// the empirical CDF relative to the independent-sample variance (floored at 1).
GofReport gof_ks(const SamplePool& pool, const Cdf& cdf);
GofReport gof_ks_two_sample(std::span<const double> a, std::span<const double> b);

// Pearson χ² of weighted observed proportions against bin probabilities with
// `n` the effective sample size; df = bins - 1 - fitted.
GofReport gof_chi2(std::span<const double> observed_weight, std::span<const double> probabilities, double n,
                   int fitted = 0);
// Pool values are bin indices; first-order Rao-Scott correction for clustering.
GofReport gof_chi2(const SamplePool& pool, std::span<const double> probabilities);

// (n-1) s² / mean ~ χ²_{n-1}; two-sided p-value. `statistic` holds the
// dispersion index s² / mean.
GofReport poisson_dispersion(std::span<const double> counts);

// Holm step-down: adjusted p-values, in input order.
std::vector<double> holm_adjust(std::span<const double> p_values);

}  // namespace stit

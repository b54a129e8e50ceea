#include "stit/stats.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace stit {

void CompensatedSum::add(double x) {
  const double s = sum_ + x;
  if (std::abs(sum_) >= std::abs(x))
    correction_ += (sum_ - s) + x;
  else
    correction_ += (x - s) + sum_;
  sum_ = s;
}

double order_free_sum(std::span<const double> xs) {
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  CompensatedSum s;
  for (double x : sorted) s.add(x);
  return s.value();
}

namespace {

struct Totals {
  double num, den, count, weight_sq;
};

Totals totals(std::span<const RatioTerm> terms) {
  std::vector<double> n, d, c, w;
  for (const auto& t : terms) {
    n.push_back(t.numerator);
    d.push_back(t.denominator);
    c.push_back(t.count);
    w.push_back(t.weight_sq);
  }
  return {order_free_sum(n), order_free_sum(d), order_free_sum(c), order_free_sum(w)};
}

// Leave-one-out ratios (Σ num - num_i) / (Σ den - den_i).
struct Jackknife {
  double variance;
  double mean;
};

Jackknife jackknife_ratio(std::span<const RatioTerm> terms, double num, double den) {
  const std::size_t r = terms.size();
  if (r < 2) return {0.0, num / den};
  std::vector<double> loo;
  loo.reserve(r);
  for (const auto& t : terms) {
    const double d = den - t.denominator;
    if (d == 0.0) continue;
    loo.push_back((num - t.numerator) / d);
  }
  if (loo.size() < 2) return {0.0, num / den};
  const double m = order_free_sum(loo) / static_cast<double>(loo.size());
  std::vector<double> sq;
  sq.reserve(loo.size());
  for (double x : loo) sq.push_back((x - m) * (x - m));
  const double k = static_cast<double>(loo.size());
  return {(k - 1.0) / k * order_free_sum(sq), m};
}

}  // namespace

EstimateReport ratio_estimate(std::span<const RatioTerm> terms, std::string statistic, std::string mode) {
  if (terms.empty()) throw StatsError("empty pool");
  const Totals tot = totals(terms);
  if (tot.den == 0.0) throw StatsError("zero denominator");
  EstimateReport rep;
  rep.statistic = std::move(statistic);
  rep.mode = std::move(mode);
  rep.estimate = tot.num / tot.den;
  const Jackknife jk = jackknife_ratio(terms, tot.num, tot.den);
  rep.std_error = std::sqrt(std::max(0.0, jk.variance));
  const double r = static_cast<double>(terms.size());
  rep.jackknife_corrected = r * rep.estimate - (r - 1.0) * jk.mean;
  if (terms.size() < 2) rep.jackknife_corrected = rep.estimate;
  rep.ci_low = rep.estimate - 1.959963984540054 * rep.std_error;
  rep.ci_high = rep.estimate + 1.959963984540054 * rep.std_error;
  rep.raw_count = tot.count;
  rep.effective_n = tot.weight_sq > 0.0 ? std::min(tot.count, tot.den * tot.den / tot.weight_sq) : 0.0;
  rep.replicates = terms.size();
  return rep;
}

double bootstrap_stderr(std::span<const RatioTerm> terms, int resamples, StreamKey key) {
  if (terms.empty()) throw StatsError("empty pool");
  if (resamples < 2) throw StatsError("bootstrap needs at least 2 resamples");
  Stream rng(key);
  const std::size_t r = terms.size();
  std::vector<double> ratios;
  ratios.reserve(resamples);
  for (int b = 0; b < resamples; ++b) {
    CompensatedSum num, den;
    for (std::size_t i = 0; i < r; ++i) {
      const auto& t = terms[static_cast<std::size_t>(rng.uniform() * static_cast<double>(r))];
      num.add(t.numerator);
      den.add(t.denominator);
    }
    if (den.value() != 0.0) ratios.push_back(num.value() / den.value());
  }
  const double m = order_free_sum(ratios) / static_cast<double>(ratios.size());
  double ss = 0.0;
  for (double x : ratios) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(ratios.size() - 1));
}

EstimateReport mean_estimate(std::span<const double> values, std::string statistic) {
  if (values.empty()) throw StatsError("empty pool");
  EstimateReport rep;
  rep.statistic = std::move(statistic);
  rep.mode = "replicate-mean";
  const double n = static_cast<double>(values.size());
  rep.estimate = order_free_sum(values) / n;
  std::vector<double> sq;
  sq.reserve(values.size());
  for (double x : values) sq.push_back((x - rep.estimate) * (x - rep.estimate));
  const double var = values.size() > 1 ? order_free_sum(sq) / (n - 1.0) : 0.0;
  rep.std_error = std::sqrt(var / n);
  rep.jackknife_corrected = rep.estimate;
  rep.ci_low = rep.estimate - 1.959963984540054 * rep.std_error;
  rep.ci_high = rep.estimate + 1.959963984540054 * rep.std_error;
  rep.effective_n = n;
  rep.raw_count = n;
  rep.replicates = values.size();
  return rep;
}

double kolmogorov_q(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

void SamplePool::add(double value, double weight) {
  values_.push_back(value);
  weights_.push_back(weight);
}

void SamplePool::end_cluster() {
  if (ends_.empty() || ends_.back() != values_.size()) ends_.push_back(values_.size());
}

void SamplePool::append(const SamplePool& other) {
  const std::size_t base = values_.size();
  end_cluster();
  values_.insert(values_.end(), other.values_.begin(), other.values_.end());
  weights_.insert(weights_.end(), other.weights_.begin(), other.weights_.end());
  for (std::size_t e : other.ends_) ends_.push_back(base + e);
  end_cluster();
}

double SamplePool::effective_size() const {
  CompensatedSum w, w2;
  for (double x : weights_) {
    w.add(x);
    w2.add(x * x);
  }
  return w2.value() > 0.0 ? w.value() * w.value() / w2.value() : 0.0;
}

namespace {

// Asymptotic p-values need a moderate sample.
void require_size(std::size_t n) {
  if (n == 0) throw StatsError("empty sample");
  if (n < 50) throw StatsError("sample of " + std::to_string(n) + " is too small for an asymptotic test (need 50)");
}

GofReport ks_report(double d, double n, std::string grid) {
  GofReport rep;
  rep.test = "KS";
  rep.statistic = d;
  rep.n = n;
  const double root = std::sqrt(n);
  rep.p_value = kolmogorov_q((root + 0.12 + 0.11 / root) * d);
  rep.grid = std::move(grid);
  return rep;
}

// Clusters as ratio terms of (Σ w 1{indicator}, Σ w).
template <class Indicator>
std::vector<RatioTerm> cluster_terms(const SamplePool& pool, Indicator&& ind) {
  std::vector<RatioTerm> terms;
  std::size_t begin = 0;
  auto ends = pool.cluster_ends();
  if (ends.empty() || ends.back() != pool.size()) ends.push_back(pool.size());
  for (std::size_t end : ends) {
    RatioTerm t;
    for (std::size_t i = begin; i < end; ++i) {
      const double w = pool.weights()[i];
      t.denominator += w;
      if (ind(pool.values()[i])) t.numerator += w;
    }
    if (end > begin) terms.push_back(t);
    begin = end;
  }
  return terms;
}

// Jackknife variance of a clustered proportion over its independent-sample
// variance.
template <class Indicator>
double proportion_design_effect(const SamplePool& pool, double n_eff, Indicator&& ind) {
  const auto terms = cluster_terms(pool, ind);
  if (terms.size() < 2) return 1.0;
  double num = 0.0, den = 0.0;
  for (const auto& t : terms) {
    num += t.numerator;
    den += t.denominator;
  }
  const double p = num / den;
  if (p <= 0.0 || p >= 1.0) return 1.0;
  const Jackknife jk = jackknife_ratio(terms, num, den);
  return jk.variance / (p * (1.0 - p) / n_eff);
}

}  // namespace

GofReport gof_ks(std::span<const double> sample, const Cdf& cdf) {
  require_size(sample.size());
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, (i + 1.0) / n - f, f - i / n});
  }
  return ks_report(d, n, "continuous reference");
}

GofReport gof_ks(const SamplePool& pool, const Cdf& cdf) {
  require_size(pool.size());
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  const auto& v = pool.values();
  const auto& w = pool.weights();
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  double total = 0.0;
  for (double x : w) total += x;
  if (!(total > 0.0)) throw StatsError("sample has no weight");

  double d = 0.0, below = 0.0;
  std::vector<double> deciles;
  double next_decile = 0.1;
  for (std::size_t k = 0; k < order.size();) {
    const double x = v[order[k]];
    double step = 0.0;
    std::size_t j = k;
    for (; j < order.size() && v[order[j]] == x; ++j) step += w[order[j]];
    const double f = cdf(x);
    d = std::max({d, std::abs((below + step) / total - f), std::abs(below / total - f)});
    below += step;
    while (next_decile < 0.95 && below / total >= next_decile) {
      deciles.push_back(x);
      next_decile += 0.1;
    }
    k = j;
  }

  const double n_eff = pool.effective_size();
  double deff_sum = 0.0;
  for (double q : deciles) deff_sum += proportion_design_effect(pool, n_eff, [q](double x) { return x <= q; });
  const double deff = deciles.empty() ? 1.0 : std::max(1.0, deff_sum / static_cast<double>(deciles.size()));
  GofReport rep = ks_report(d, n_eff / deff, "weighted, clustered");
  rep.design_effect = deff;
  return rep;
}

GofReport gof_ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw StatsError("empty sample");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size());
  const double m = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(i / n - j / m));
  }
  GofReport rep = ks_report(d, n * m / (n + m), "two-sample");
  rep.test = "KS2";
  return rep;
}

GofReport gof_chi2(std::span<const double> observed_weight, std::span<const double> probabilities, double n,
                   int fitted) {
  if (observed_weight.size() != probabilities.size() || probabilities.size() < 2)
    throw StatsError("chi-square needs matching bins (>= 2)");
  double total = 0.0;
  for (double o : observed_weight) total += o;
  if (!(total > 0.0) || !(n > 0.0)) throw StatsError("empty sample");
  double stat = 0.0;
  for (std::size_t b = 0; b < probabilities.size(); ++b) {
    const double expected = n * probabilities[b];
    const double observed = n * observed_weight[b] / total;
    stat += (observed - expected) * (observed - expected) / expected;
  }
  const int df = static_cast<int>(probabilities.size()) - 1 - fitted;
  if (df < 1) throw StatsError("chi-square has no degrees of freedom");
  GofReport rep;
  rep.test = "chi2";
  rep.statistic = stat;
  rep.p_value = boost::math::gamma_q(0.5 * df, 0.5 * stat);
  rep.n = n;
  rep.grid = std::to_string(probabilities.size()) + " bins";
  return rep;
}

GofReport gof_chi2(const SamplePool& pool, std::span<const double> probabilities) {
  require_size(pool.size());
  std::vector<double> observed(probabilities.size(), 0.0);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const auto b = static_cast<std::size_t>(pool.values()[i]);
    if (b >= observed.size()) throw StatsError("bin index out of range");
    observed[b] += pool.weights()[i];
  }
  const double n_eff = pool.effective_size();
  double deff_sum = 0.0;
  for (std::size_t b = 0; b < probabilities.size(); ++b)
    deff_sum += proportion_design_effect(pool, n_eff, [b](double x) { return static_cast<std::size_t>(x) == b; });
  const double deff = std::max(1.0, deff_sum / static_cast<double>(probabilities.size()));
  GofReport rep = gof_chi2(observed, probabilities, n_eff / deff);
  rep.design_effect = deff;
  return rep;
}

GofReport poisson_dispersion(std::span<const double> counts) {
  if (counts.size() < 2) throw StatsError("dispersion test needs at least 2 counts");
  const double n = static_cast<double>(counts.size());
  const double mean = order_free_sum(counts) / n;
  std::vector<double> sq;
  sq.reserve(counts.size());
  for (double c : counts) sq.push_back((c - mean) * (c - mean));
  const double var = order_free_sum(sq) / (n - 1.0);
  if (!(mean > 0.0)) throw StatsError("dispersion test needs a positive mean");
  const double stat = (n - 1.0) * var / mean;
  const double upper = boost::math::gamma_q(0.5 * (n - 1.0), 0.5 * stat);
  GofReport rep;
  rep.test = "poisson-dispersion";
  rep.statistic = var / mean;
  rep.p_value = std::min(1.0, 2.0 * std::min(upper, 1.0 - upper));
  rep.n = n;
  rep.grid = "chi2 with " + std::to_string(counts.size() - 1) + " df";
  return rep;
}

std::vector<double> holm_adjust(std::span<const double> p_values) {
  const std::size_t m = p_values.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
  std::vector<double> adjusted(m);
  double running = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    running = std::max(running, std::min(1.0, static_cast<double>(m - k) * p_values[order[k]]));
    adjusted[order[k]] = running;
  }
  return adjusted;
}

}  // namespace stit

#include "stit/verify.hpp"

#include "stit/analytic.hpp"
#include "stit/extract.hpp"
#include "stit/quadrature.hpp"
#include "stit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace stit {

Suite parse_suite(const std::string& text) {
  if (text == "quick") return Suite::quick;
  if (text == "full") return Suite::full;
  throw std::invalid_argument("suite must be quick or full");
}

const char* to_string(Suite suite) { return suite == Suite::quick ? "quick" : "full"; }

namespace {

std::string num(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) { return mix64(seed ^ mix64(tag * 0x9e3779b97f4a7c15ULL)); }

Check check(std::string name, double estimate, double target, bool pass, std::string tolerance, std::string note = {}) {
  return Check{std::move(name), pass, estimate, target, std::move(tolerance), std::move(note)};
}

// |estimate - target| <= 3 se and <= cap.
Check statistical_check(const std::string& name, const EstimateReport& r, double target, double cap,
                        std::string note = {}) {
  const double diff = std::abs(r.estimate - target);
  const bool pass = diff <= 3.0 * r.std_error && diff <= cap;
  return check(name, r.estimate, target, pass, "3se=" + num(3.0 * r.std_error) + " & " + num(cap), std::move(note));
}

struct Scale {
  std::size_t c4 = 0;
  std::size_t c5 = 0;
  std::size_t c8 = 0;
  std::size_t c9_counts = 0;
  std::size_t c9_density = 0;
  std::size_t c10_stit = 0;
  std::size_t c10_pht = 0;
};

Scale scale_of(Suite suite) {
  if (suite == Suite::full) return {10000, 20000, 10000, 10000, 4000, 4000, 2000};
  return {1000, 2000, 1000, 1000, 500, 500, 300};
}

constexpr double kMargin = 0.15;

// The GOF family accumulates while criteria run; Holm adjustment resolves the
// pass flags at the end.
struct Family {
  struct Slot {
    std::size_t criterion;
    std::size_t check;
  };
  std::vector<FamilyMember> members;
  std::vector<Slot> slots;

  void add(std::vector<CriterionResult>& out, int id, const std::string& name, const GofReport& report) {
    CriterionResult& c = out.back();
    slots.push_back({out.size() - 1, c.checks.size()});
    members.push_back(FamilyMember{id, name, report, 1.0});
    c.checks.push_back(check(name, report.p_value, 0.0, true, "p_holm>0.01",
                             report.test + " n=" + num(report.n) + " deff=" + num(report.design_effect)));
  }

  void resolve(std::vector<CriterionResult>& out, double level) {
    std::vector<double> ps;
    for (const auto& m : members) ps.push_back(m.report.p_value);
    const auto adjusted = holm_adjust(ps);
    for (std::size_t i = 0; i < members.size(); ++i) {
      members[i].adjusted = adjusted[i];
      Check& c = out[slots[i].criterion].checks[slots[i].check];
      c.pass = adjusted[i] > level;
      c.note += " p_holm=" + num(adjusted[i]);
    }
  }
};

// ---- analytic criteria -----------------------------------------------------

CriterionResult criterion_1() {
  CriterionResult c{1, "analytic constants d=3 length-weighted", {}};
  const double pinned[2] = {0.173506, 0.159712};
  for (int n = 0; n < 2; ++n) {
    const double q = p_internal(3, SegmentMode::length_weighted, n);
    const double exact = exact_p_internal(3, SegmentMode::length_weighted, n)->value;
    const double rounded = std::round(q * 1e6) / 1e6;
    c.checks.push_back(check("p" + std::to_string(n) + "_quadrature", q, exact, std::abs(q - exact) <= 1e-8, "1e-8"));
    c.checks.push_back(
        check("p" + std::to_string(n) + "_6dp", rounded, pinned[n], std::abs(rounded - pinned[n]) < 5e-8, "6 decimals"));
  }
  return c;
}

CriterionResult criterion_2() {
  CriterionResult c{2, "mean internal vertices", {}};
  struct Case {
    int d;
    SegmentMode mode;
    double target;
  };
  for (const Case k : {Case{2, SegmentMode::typical, 2.0}, Case{3, SegmentMode::typical, 2.0},
                       Case{3, SegmentMode::length_weighted, 7.0}, Case{4, SegmentMode::length_weighted, 6.0}}) {
    const auto s = p_internal_series(k.d, k.mode, 500, 1.0);
    const double mean = s.mean_head + s.mean_tail;
    const std::string name = "d" + std::to_string(k.d) + "_" + to_string(k.mode);
    c.checks.push_back(check(name, mean, k.target, std::abs(mean - k.target) <= 1e-3, "1e-3",
                             "head(n<=500)=" + num(s.mean_head) + " tail=" + num(s.mean_tail)));
  }
  return c;
}

CriterionResult criterion_3() {
  CriterionResult c{3, "internal-vertex law free of t", {}};
  for (int d : {2, 3})
    for (SegmentMode mode : {SegmentMode::typical, SegmentMode::length_weighted}) {
      std::vector<std::vector<double>> ps;
      for (double t : {0.5, 1.0, 7.0}) ps.push_back(p_internal_series(d, mode, 5, t).p);
      double worst = 0.0;
      for (std::size_t a = 0; a < ps.size(); ++a)
        for (std::size_t b = a + 1; b < ps.size(); ++b)
          for (std::size_t n = 0; n < ps[a].size(); ++n) worst = std::max(worst, std::abs(ps[a][n] - ps[b][n]));
      c.checks.push_back(
          check("d" + std::to_string(d) + "_" + to_string(mode), worst, 0.0, worst <= 1e-8, "1e-8", "max |Δp(n)|, n<=5"));
    }
  return c;
}

// ---- simulation helpers ----------------------------------------------------

struct SegmentRecord {
  int n = 0;
  double length = 0.0;
};

void add_segment_terms(const MaximalSegment& s, Weighting w, RatioTerm& p0, RatioTerm& p1, RatioTerm& mean) {
  const double wt = weight_of(s, w);
  for (RatioTerm* r : {&p0, &p1, &mean}) {
    r->denominator += wt;
    r->count += 1.0;
    r->weight_sq += wt * wt;
  }
  if (s.internal_vertices == 0) p0.numerator += wt;
  if (s.internal_vertices == 1) p1.numerator += wt;
  mean.numerator += wt * s.internal_vertices;
}

// Line-section points along e1 through the window centre.
struct LineSample {
  double count = 0.0;
  SamplePool spacing;  // probability-integral transforms of the gaps
};

LineSample line_sample(const Tessellation& tess, double rate, StreamKey key) {
  const auto [lo, hi] = tess.window.bounds();
  Vec base = 0.5 * (lo + hi);
  base[0] = lo[0];
  Vec u = Vec::Zero();
  u[0] = 1.0;
  const auto [length, entry] = window_chord(tess.window, base, u);
  std::vector<double> pts;
  for (double tau : line_section(tess, base, u))
    if (tau > entry && tau < entry + length) pts.push_back(tau - entry);
  LineSample out;
  out.count = static_cast<double>(pts.size());
  // gaps starting at the entry point and at every point in the first half;
  // each gap is observed up to half the chord, censored beyond it
  const double half = 0.5 * length;
  const double censored = 1.0 - std::exp(-rate * half);
  Stream rng(key);
  double from = 0.0;
  for (std::size_t i = 0; i <= pts.size() && from <= half; ++i) {
    const double gap = i < pts.size() ? pts[i] - from : std::numeric_limits<double>::infinity();
    const double u01 = gap < half ? 1.0 - std::exp(-rate * gap) : censored + rng.uniform() * (1.0 - censored);
    out.spacing.add(u01);
    if (i < pts.size()) from = pts[i];
  }
  out.spacing.end_cluster();
  return out;
}

double uniform_cdf(double x) { return std::clamp(x, 0.0, 1.0); }

void line_checks(CriterionResult& c, Family& fam, std::vector<CriterionResult>& out, const std::string& tag,
                 std::span<const double> counts, const SamplePool& spacing, double expected) {
  const EstimateReport m = mean_estimate(counts, "line_points");
  c.checks.push_back(statistical_check(tag + "_mean", m, expected, std::numeric_limits<double>::infinity()));
  c.checks.back().tolerance = "3se=" + num(3.0 * m.std_error);
  const GofReport disp = poisson_dispersion(counts);
  c.checks.push_back(check(tag + "_dispersion", disp.statistic, 1.0, disp.statistic >= 0.95 && disp.statistic <= 1.05,
                           "[0.95,1.05]", "p=" + num(disp.p_value)));
  fam.add(out, c.id, tag + "_spacing_ks", gof_ks(spacing, uniform_cdf));
}

double chord_length_sum(const Tessellation& tess) {
  std::vector<double> ls;
  for (const auto& e : tess.events) ls.push_back((e.face.vertices[1] - e.face.vertices[0]).norm());
  return order_free_sum(ls);
}

// ---- criteria 4, 6, 7, 11 on d = 2 ----------------------------------------

struct D2Replicate {
  RatioTerm p0, p1, mean;
  std::vector<SegmentRecord> segments;
  SamplePool typical_last, weighted_last;
  LineSample line;
};

struct D2Run {
  std::vector<RatioTerm> p0, mean;
  std::vector<SegmentRecord> segments;
  SamplePool typical_last, weighted_last, spacing;
  std::vector<double> line_counts;
};

D2Run run_d2(const std::string& q, std::size_t replicates, std::uint64_t seed, int threads) {
  const McSpec spec{ConvexPolytope::box(std::vector<double>{1.0, 1.0}), DirectionalDistribution::parse(q, 2), 20.0,
                    replicates, seed, kMargin};
  Vec e1 = Vec::Zero();
  e1[0] = 1.0;
  const double rate = spec.t * lambda_of_segment(spec.q, e1);
  auto reps = mc_run(spec, threads, [&](const Tessellation& tess, std::size_t i) {
    D2Replicate r;
    const auto segs = maximal_segments(tess);
    for (const auto& s : minus_sample(segs, tess.window, kMargin)) {
      add_segment_terms(s, Weighting::typical, r.p0, r.p1, r.mean);
      r.segments.push_back({s.internal_vertices, s.length});
    }
    for (const auto& s : reference_point_sample(segs, tess.window, kMargin)) r.typical_last.add(s.birth_times.back());
    r.typical_last.end_cluster();
    for (int axis = 0; axis < 2; ++axis)
      for (const auto& s : crossing_sample(segs, axis, 0.5)) r.weighted_last.add(s.birth_times.back());
    r.weighted_last.end_cluster();
    r.line = line_sample(tess, rate, StreamKey::root(seed ^ 0x5ac1, i));
    return r;
  });
  D2Run run;
  for (auto& r : reps) {
    run.p0.push_back(r.p0);
    run.mean.push_back(r.mean);
    run.segments.insert(run.segments.end(), r.segments.begin(), r.segments.end());
    run.typical_last.append(r.typical_last);
    run.weighted_last.append(r.weighted_last);
    run.spacing.append(r.line.spacing);
    run.line_counts.push_back(r.line.count);
  }
  return run;
}

// ---- criteria 5, 6, 7 on d = 3 --------------------------------------------

struct D3Replicate {
  RatioTerm p0, p1, mean;
  SamplePool typical_last, weighted_last, simplex_bins;
  LineSample line;
};

struct D3Run {
  std::vector<RatioTerm> p0, p1, mean;
  SamplePool typical_last, weighted_last, simplex_bins, spacing;
  std::vector<double> line_counts;
};

double simplex_bin(double b1, double b2, double t) {
  const double u2 = b2 / t;
  const int quintile = std::min(4, static_cast<int>(5.0 * u2 * u2));
  return 2.0 * quintile + (b1 / b2 < 0.5 ? 0.0 : 1.0);
}

D3Run run_d3(std::size_t replicates, std::uint64_t seed, int threads) {
  const McSpec spec{ConvexPolytope::box(std::vector<double>{1.0, 1.0, 1.0}), DirectionalDistribution::axis_aligned(3),
                    6.0, replicates, seed, kMargin};
  Vec e1 = Vec::Zero();
  e1[0] = 1.0;
  const double rate = spec.t * lambda_of_segment(spec.q, e1);
  auto reps = mc_run(spec, threads, [&](const Tessellation& tess, std::size_t i) {
    D3Replicate r;
    const auto segs = maximal_segments(tess);
    for (const auto& s : minus_sample(segs, tess.window, kMargin))
      add_segment_terms(s, Weighting::length, r.p0, r.p1, r.mean);
    for (const auto& s : reference_point_sample(segs, tess.window, kMargin)) r.typical_last.add(s.birth_times.back());
    r.typical_last.end_cluster();
    for (int axis = 0; axis < 3; ++axis)
      for (const auto& s : crossing_sample(segs, axis, 0.5)) {
        r.weighted_last.add(s.birth_times[1]);
        r.simplex_bins.add(simplex_bin(s.birth_times[0], s.birth_times[1], spec.t));
      }
    r.weighted_last.end_cluster();
    r.simplex_bins.end_cluster();
    r.line = line_sample(tess, rate, StreamKey::root(seed ^ 0x5ac1, i));
    return r;
  });
  D3Run run;
  for (auto& r : reps) {
    run.p0.push_back(r.p0);
    run.p1.push_back(r.p1);
    run.mean.push_back(r.mean);
    run.typical_last.append(r.typical_last);
    run.weighted_last.append(r.weighted_last);
    run.simplex_bins.append(r.simplex_bins);
    run.spacing.append(r.line.spacing);
    run.line_counts.push_back(r.line.count);
  }
  return run;
}

// ---- criterion 8, 9, 10 ----------------------------------------------------

struct CountAndLength {
  double cells = 0.0;
  double length = 0.0;
};

template <class Make>
std::vector<CountAndLength> census(std::size_t replicates, int threads, Make&& make) {
  return parallel_map(replicates, threads, [&](std::size_t i) {
    const Tessellation tess = make(i);
    return CountAndLength{static_cast<double>(tess.cells.size()), chord_length_sum(tess)};
  });
}

std::vector<double> field(std::span<const CountAndLength> xs, double CountAndLength::*member) {
  std::vector<double> out;
  for (const auto& x : xs) out.push_back(x.*member);
  return out;
}

struct RatioOfMeans {
  double estimate;
  double std_error;
};

RatioOfMeans ratio_of_means(const EstimateReport& num, const EstimateReport& den) {
  const double r = num.estimate / den.estimate;
  const double rel = std::hypot(num.std_error / num.estimate, den.std_error / den.estimate);
  return {r, std::abs(r) * rel};
}

}  // namespace

// ---- window-truncation theory ---------------------------------------------

WindowPrediction window_truncated_prediction(int d, int j, double t, double a, double lambda_u, bool isotropic) {
  if (d != 2 && d != 3) throw std::invalid_argument("window prediction needs d = 2 or 3");
  if (isotropic && d != 2) throw std::invalid_argument("isotropic window prediction needs d = 2");
  const auto outer = graded_rule(t, 24, 20);
  const auto inner = composite_rule(0.0, 1.0, 24, 1);
  const auto angles = composite_rule(0.0, std::numbers::pi / 2.0, 24, 8);
  const auto unit = composite_rule(0.0, 1.0, 24, 4);
  const SegmentMode mode = j == 0 ? SegmentMode::typical : SegmentMode::length_weighted;
  double num0 = 0.0, num1 = 0.0, numm = 0.0, den = 0.0;

  // weight: birth-time density x length density x inclusion fraction
  auto accumulate = [&](double weight, double sigma, double big_a) {
    auto over_lengths = [&](double lmax, auto&& inclusion, double w0) {
      for (const auto& p : unit) {
        const double l = p.x * lmax;
        const double base = w0 * p.w * lmax * segment_length_density(lambda_u, sigma, mode, l) * inclusion(l);
        const double mu = lambda_u * l * big_a;
        const double e = std::exp(-mu);
        num0 += base * e;
        num1 += base * mu * e;
        numm += base * mu;
        den += base;
      }
    };
    if (!isotropic) {
      over_lengths(a, [&](double l) { return a - l; }, weight);
      return;
    }
    for (const auto& th : angles) {
      const double c = std::cos(th.x), s = std::sin(th.x);
      over_lengths(a / std::max(c, s), [&](double l) { return (a - l * c) * (a - l * s); }, weight * th.w);
    }
  };

  for (const auto& o : outer) {
    const double sigma = o.x;
    if (d == 2) {
      const double dens = j == 0 ? 2.0 * sigma / (t * t) : 1.0 / t;
      accumulate(o.w * dens, sigma, 2.0 * t - 2.0 * sigma);
    } else {
      const double dens = j == 0 ? 3.0 * sigma / (t * t * t) : 2.0 / (t * t);
      for (const auto& in : inner) {
        const double s1 = in.x * sigma;
        accumulate(o.w * in.w * sigma * dens, sigma, 3.0 * t - 2.0 * sigma - s1);
      }
    }
  }
  return {num0 / den, num1 / den, numm / den};
}

// ---- report ----------------------------------------------------------------

bool CriterionResult::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::string CriterionResult::line() const {
  std::ostringstream os;
  os << (pass() ? "PASS" : "FAIL") << " C" << id << " " << title << ":";
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const Check& c = checks[i];
    os << (i ? "; " : " ") << c.name << " estimate=" << num(c.estimate);
    if (c.tolerance.rfind("p_holm", 0) != 0) os << " target=" << num(c.target);
    os << " tol=" << c.tolerance << (c.pass ? "" : " [fail]");
  }
  return os.str();
}

bool VerifyReport::all_pass() const {
  return std::all_of(criteria.begin(), criteria.end(), [](const CriterionResult& c) { return c.pass(); });
}

std::string VerifyReport::summary_text() const {
  std::string out;
  for (const auto& c : criteria) out += c.line() + "\n";
  out += all_pass() ? "ALL PASS\n" : "SOME FAIL\n";
  return out;
}

Json VerifyReport::summary_json() const {
  Json crit = Json::array();
  for (const auto& c : criteria) {
    Json checks = Json::array();
    for (const auto& k : c.checks)
      checks.push_back(Json{{"name", k.name},
                            {"pass", k.pass},
                            {"estimate", k.estimate},
                            {"target", k.target},
                            {"tolerance", k.tolerance},
                            {"note", k.note}});
    crit.push_back(Json{{"id", c.id}, {"title", c.title}, {"pass", c.pass()}, {"checks", checks}});
  }
  Json fam = Json::array();
  for (const auto& m : family)
    fam.push_back(Json{{"criterion", m.criterion}, {"name", m.name}, {"report", to_json(m.report)},
                       {"p_holm", m.adjusted}});
  return Json{{"version", kVersion}, {"suite", to_string(suite)}, {"seed", seed},
              {"all_pass", all_pass()}, {"criteria", crit}, {"gof_family", fam}};
}

// ---- driver ----------------------------------------------------------------

VerifyReport run_verify(const VerifyOptions& opts) {
  const Scale sc = scale_of(opts.suite);
  VerifyReport report;
  report.suite = opts.suite;
  report.seed = opts.seed;
  auto& out = report.criteria;
  Family fam;

  out.push_back(criterion_1());
  out.push_back(criterion_2());
  out.push_back(criterion_3());

  // simulations shared by several criteria
  const D2Run iso = run_d2("isotropic", sc.c4, derive(opts.seed, 41), opts.threads);
  const D2Run axis = run_d2("axis", sc.c4, derive(opts.seed, 42), opts.threads);
  const D3Run cube = run_d3(sc.c5, derive(opts.seed, 51), opts.threads);

  Vec e1 = Vec::Zero();
  e1[0] = 1.0;
  const double lam_iso2 = lambda_of_segment(DirectionalDistribution::isotropic(2), e1);
  const double lam_axis2 = lambda_of_segment(DirectionalDistribution::axis_aligned(2), e1);
  const double lam_axis3 = lambda_of_segment(DirectionalDistribution::axis_aligned(3), e1);
  const double inner_side = 1.0 - 2.0 * kMargin;

  {  // 4
    out.push_back(CriterionResult{4, "typical maximal segments d=2 vs whole-space law", {}});
    auto& c = out.back();
    const double p0_target = 8.0 * std::numbers::ln2 - 5.0;
    const auto pred_iso = window_truncated_prediction(2, 0, 20.0, inner_side, lam_iso2, true);
    const auto pred_axis = window_truncated_prediction(2, 0, 20.0, inner_side, lam_axis2, false);
    const auto p_iso = ratio_estimate(iso.p0, "p_internal(0)", "typical");
    const auto p_axis = ratio_estimate(axis.p0, "p_internal(0)", "typical");
    const auto m_iso = ratio_estimate(iso.mean, "mean_internal", "typical");
    const auto m_axis = ratio_estimate(axis.mean, "mean_internal", "typical");
    c.checks.push_back(statistical_check("p0_isotropic", p_iso, p0_target, 0.01,
                                         "window-truncated expectation " + num(pred_iso.p0)));
    c.checks.push_back(statistical_check("p0_axis", p_axis, p0_target, 0.01,
                                         "window-truncated expectation " + num(pred_axis.p0)));
    c.checks.push_back(statistical_check("mean_isotropic", m_iso, 2.0, 0.05,
                                         "window-truncated expectation " + num(pred_iso.mean)));
    c.checks.push_back(statistical_check("mean_axis", m_axis, 2.0, 0.05,
                                         "window-truncated expectation " + num(pred_axis.mean)));
    for (const auto& [name, a, b] : {std::tuple{"p0_iso_minus_axis", p_iso, p_axis},
                                     std::tuple{"mean_iso_minus_axis", m_iso, m_axis}}) {
      const double se = std::hypot(a.std_error, b.std_error);
      const double diff = a.estimate - b.estimate;
      c.checks.push_back(check(name, diff, 0.0, std::abs(diff) <= 3.0 * se, "3se=" + num(3.0 * se)));
    }
    const double boot = bootstrap_stderr(iso.p0, 500, StreamKey::root(derive(opts.seed, 43), 0));
    c.checks.push_back(check("jackknife_over_bootstrap_se", p_iso.std_error / boot, 1.0,
                             std::abs(p_iso.std_error / boot - 1.0) <= 0.3, "0.3"));
  }

  {  // 5
    out.push_back(CriterionResult{5, "length-weighted maximal segments d=3 vs whole-space law", {}});
    auto& c = out.back();
    const auto pred = window_truncated_prediction(3, 1, 6.0, inner_side, lam_axis3, false);
    const double t0 = exact_p_internal(3, SegmentMode::length_weighted, 0)->value;
    const double t1 = exact_p_internal(3, SegmentMode::length_weighted, 1)->value;
    c.checks.push_back(statistical_check("p0", ratio_estimate(cube.p0, "p_internal(0)", "length"), t0, 0.01,
                                         "window-truncated expectation " + num(pred.p0)));
    c.checks.push_back(statistical_check("p1", ratio_estimate(cube.p1, "p_internal(1)", "length"), t1, 0.01,
                                         "window-truncated expectation " + num(pred.p1)));
    c.checks.push_back(statistical_check("mean", ratio_estimate(cube.mean, "mean_internal", "length"), 7.0, 0.3,
                                         "window-truncated expectation " + num(pred.mean)));
  }

  {  // 6
    out.push_back(CriterionResult{6, "birth-time laws", {}});
    const std::vector<double> tenth(10, 0.1);
    fam.add(out, 6, "d3_length_simplex_chi2", gof_chi2(cube.simplex_bins, tenth));
    auto last = [](int d, int j, double t) { return [=](double s) { return last_birth_time_cdf(d, j, t, s); }; };
    fam.add(out, 6, "d2_typical_last_ks", gof_ks(iso.typical_last, last(2, 0, 20.0)));
    fam.add(out, 6, "d2_length_last_ks", gof_ks(iso.weighted_last, last(2, 1, 20.0)));
    fam.add(out, 6, "d3_typical_last_ks", gof_ks(cube.typical_last, last(3, 0, 6.0)));
    fam.add(out, 6, "d3_length_last_ks", gof_ks(cube.weighted_last, last(3, 1, 6.0)));
  }

  {  // 7
    out.push_back(CriterionResult{7, "line sections are Poisson", {}});
    line_checks(out.back(), fam, out, "d2", iso.line_counts, iso.spacing, 20.0 * lam_iso2);
    line_checks(out.back(), fam, out, "d3", cube.line_counts, cube.spacing, 6.0 * lam_axis3);
  }

  {  // 8
    out.push_back(CriterionResult{8, "iteration stability", {}});
    const auto W = ConvexPolytope::box(std::vector<double>{1.0, 1.0});
    const auto Q = DirectionalDistribution::isotropic(2);
    const std::uint64_t s_it = derive(opts.seed, 81), s_direct = derive(opts.seed, 82);
    const auto it = census(sc.c8, opts.threads, [&](std::size_t i) { return iterate(W, Q, 5.0, 5.0, {s_it, i}); });
    const auto direct =
        census(sc.c8, opts.threads, [&](std::size_t i) { return simulate_stit(W, Q, 10.0, {s_direct, i}); });
    fam.add(out, 8, "cell_count_ks2",
            gof_ks_two_sample(field(it, &CountAndLength::cells), field(direct, &CountAndLength::cells)));
    fam.add(out, 8, "edge_length_ks2",
            gof_ks_two_sample(field(it, &CountAndLength::length), field(direct, &CountAndLength::length)));
  }

  {  // 9
    out.push_back(CriterionResult{9, "scaling", {}});
    auto& c = out.back();
    const auto Q = DirectionalDistribution::isotropic(2);
    const double r = 5.0;
    const auto W = ConvexPolytope::box(std::vector<double>{1.0, 1.0});
    const auto rW = ConvexPolytope::box(std::vector<double>{r, r});
    const std::uint64_t s_a = derive(opts.seed, 91), s_b = derive(opts.seed, 92);
    const auto scaled = census(sc.c9_counts, opts.threads,
                               [&](std::size_t i) { return rescale(simulate_stit(W, Q, r, {s_a, i}), r); });
    const auto big = census(sc.c9_counts, opts.threads, [&](std::size_t i) { return simulate_stit(rW, Q, 1.0, {s_b, i}); });
    fam.add(out, 9, "cell_count_ks2",
            gof_ks_two_sample(field(scaled, &CountAndLength::cells), field(big, &CountAndLength::cells)));

    for (const auto& [k, j] : {std::pair{1, 1}, std::pair{1, 0}}) {
      std::vector<EstimateReport> at;
      for (double t : {4.0, 8.0}) {
        const std::uint64_t s = derive(opts.seed, 93 + static_cast<std::uint64_t>(t) + 16 * j);
        const auto v = parallel_map(sc.c9_density, opts.threads, [&](std::size_t i) {
          return density_contribution(simulate_stit(W, Q, t, {s, i}), k, j, kMargin);
        });
        at.push_back(mean_estimate(v, "density"));
      }
      const auto ratio = ratio_of_means(at[1], at[0]);
      const double target = std::pow(2.0, 2 - j);
      const double diff = std::abs(ratio.estimate - target);
      c.checks.push_back(check("density_ratio_k" + std::to_string(k) + "_j" + std::to_string(j), ratio.estimate,
                               target, diff <= 3.0 * ratio.std_error, "3se=" + num(3.0 * ratio.std_error),
                               "t=8 over t=4"));
    }
  }

  {  // 10
    out.push_back(CriterionResult{10, "length laws given last birth time", {}});
    const double side = 10.0;
    const double a = side * inner_side;
    const auto W = ConvexPolytope::box(std::vector<double>{side, side});
    const auto Q = DirectionalDistribution::axis_aligned(2);

    const std::uint64_t s_stit = derive(opts.seed, 101);
    const auto stit_pools = parallel_map(sc.c10_stit, opts.threads, [&](std::size_t i) {
      SamplePool p;
      const auto tess = simulate_stit(W, Q, 1.0, {s_stit, i});
      for (const auto& s : minus_sample(maximal_segments(tess), W, kMargin)) p.add(s.length, s.length);
      p.end_cluster();
      return p;
    });
    SamplePool stit_pool;
    for (const auto& p : stit_pools) stit_pool.append(p);
    const InclusionWeightedCdf mixture([&](double x) { return mixture_length_density(2, 1, 1.0, lam_axis2, x); }, a);
    fam.add(out, 10, "stit_length_weighted_ks", gof_ks(stit_pool, [&](double x) { return mixture(x); }));

    const double s = 2.0;
    const std::uint64_t s_pht = derive(opts.seed, 102);
    const auto pht_pools = parallel_map(sc.c10_pht, opts.threads, [&](std::size_t i) {
      SamplePool p;
      const auto tess = simulate_pht(W, Q, s, {s_pht, i});
      for (const auto& e : minus_sample(pht_edges(tess), W, kMargin)) p.add(e.length, e.length);
      p.end_cluster();
      return p;
    });
    SamplePool pht_pool;
    for (const auto& p : pht_pools) pht_pool.append(p);
    const InclusionWeightedCdf erlang(
        [&](double x) { return segment_length_density(lam_axis2, s, SegmentMode::length_weighted, x); }, a);
    fam.add(out, 10, "pht_length_weighted_edge_ks", gof_ks(pht_pool, [&](double x) { return erlang(x); }));
  }

  {  // 11
    out.push_back(CriterionResult{11, "length reweighting of the typical sample", {}});
    auto& c = out.back();
    std::vector<MaximalSegment> pool;
    for (const auto& r : iso.segments) {
      MaximalSegment s;
      s.length = r.length;
      s.internal_vertices = r.n;
      pool.push_back(s);
    }
    const auto direct = empirical_distribution(pool, Weighting::length, Statistic::internal_vertices);
    const auto typical = empirical_distribution(pool, Weighting::typical, Statistic::internal_vertices);
    std::vector<double> reweighted_total;
    for (std::size_t i = 0; i < typical.size(); ++i) reweighted_total.push_back(typical.weights[i] * pool[i].length);
    const double total = order_free_sum(reweighted_total);
    for (int n = 0; n <= 2; ++n) {
      std::vector<double> d_terms, r_terms;
      for (std::size_t i = 0; i < pool.size(); ++i)
        if (pool[i].internal_vertices == n) {
          d_terms.push_back(direct.weights[i]);
          r_terms.push_back(typical.weights[i] * pool[i].length);
        }
      const double dv = order_free_sum(d_terms);
      const double rv = order_free_sum(r_terms) / total;
      c.checks.push_back(check("p" + std::to_string(n) + "_direct_minus_reweighted", dv - rv, 0.0,
                               std::abs(dv - rv) <= 1e-12, "1e-12", "direct=" + num(dv)));
    }
  }

  fam.resolve(out, opts.family_level);
  report.family = fam.members;

  {  // 12
    out.push_back(CriterionResult{12, "thread-count independence", {}});
    auto& c = out.back();
    if (opts.determinism_check) {
      VerifyOptions one{Suite::quick, opts.seed, 1, opts.family_level, false};
      VerifyOptions eight = one;
      eight.threads = 8;
      const auto a = run_verify(one);
      const auto b = run_verify(eight);
      const bool same = a.summary_text() == b.summary_text() && a.summary_json().dump() == b.summary_json().dump();
      c.checks.push_back(check("quick_summary_threads_1_vs_8", same ? 1.0 : 0.0, 1.0, same, "byte-identical"));
    } else {
      c.checks.push_back(check("skipped", 1.0, 1.0, true, "nested run"));
    }
  }
  return report;
}

}  // namespace stit

// Command-line front end: simulate, estimate, analytic, verify, render,
// linesection. Exit codes: 0 success, 1 failure, 2 usage error.

#include "stit/analytic.hpp"
#include "stit/config.hpp"
#include "stit/extract.hpp"
#include "stit/io.hpp"
#include "stit/stats.hpp"
#include "stit/verify.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace stit;

namespace {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + cfg.out);
  f << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string fixed(double x, int digits = 6) {
  if (std::isinf(x)) return "infinite";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::vector<int> parse_range(const std::string& text) {
  std::vector<int> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const int a = std::stoi(text.substr(0, dots)), b = std::stoi(text.substr(dots + 2));
    if (a < 0 || b < a) throw UsageError("bad range '" + text + "'");
    for (int n = a; n <= b; ++n) out.push_back(n);
    return out;
  }
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    const int n = std::stoi(item);
    if (n < 0) throw UsageError("n must be >= 0");
    out.push_back(n);
  }
  if (out.empty()) throw UsageError("empty n list");
  return out;
}

Vec vec_of(const std::vector<double>& xs, int d, const char* what) {
  if (static_cast<int>(xs.size()) != d) throw UsageError(std::string(what) + " needs " + std::to_string(d) + " values");
  Vec v = Vec::Zero();
  for (int k = 0; k < d; ++k) v[k] = xs[k];
  return v;
}

// ---- simulate --------------------------------------------------------------

struct SimulateArgs {
  bool pht = false;
  bool svg = false;
  std::string svg_out;
};

int cmd_simulate(const RunConfig& cfg, const SimulateArgs& a) {
  cfg.validate(true);
  if (a.svg && cfg.d != 2) throw UsageError("--svg needs d = 2");
  const auto W = cfg.window_polytope();
  const auto Q = cfg.direction();
  const auto tessellations = parallel_map(cfg.replicates, cfg.threads, [&](std::size_t i) {
    const RunSeed seed{cfg.seed, i};
    return a.pht ? simulate_pht(W, Q, cfg.t, seed) : simulate_stit(W, Q, cfg.t, seed);
  });

  if (cfg.format == "csv") {
    std::ostringstream os;
    for (const auto& tess : tessellations) write_segments_csv(os, maximal_segments(tess), cfg.d);
    emit(cfg, os.str());
  } else if (cfg.format == "table") {
    std::ostringstream os;
    os << "replicate cells events\n";
    for (std::size_t i = 0; i < tessellations.size(); ++i)
      os << i << ' ' << tessellations[i].cells.size() << ' ' << tessellations[i].events.size() << '\n';
    emit(cfg, os.str());
  } else {
    Json j{{"config", cfg.to_json()}};
    if (tessellations.size() == 1) {
      j["tessellation"] = to_json(tessellations.front());
    } else {
      j["tessellations"] = Json::array();
      for (const auto& t : tessellations) j["tessellations"].push_back(to_json(t));
    }
    emit(cfg, dump(j));
  }

  if (a.svg) {
    std::string path = a.svg_out;
    if (path.empty()) path = cfg.out.empty() ? "tessellation.svg" : cfg.out + ".svg";
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << render_svg(tessellations.front());
  }
  return 0;
}

// ---- estimate --------------------------------------------------------------

struct EstimateArgs {
  std::string stat;
  std::string mode = "typical";
  int n = 0;
  int k = 1;
  int j = 0;
};

int cmd_estimate(const RunConfig& cfg, const EstimateArgs& a) {
  cfg.validate(true);
  const McSpec spec{cfg.window_polytope(), cfg.direction(), cfg.t, cfg.replicates, cfg.seed, cfg.margin};
  EstimateReport report;

  if (a.stat == "density") {
    const auto v = parallel_map(cfg.replicates, cfg.threads, [&](std::size_t i) {
      return density_contribution(simulate_stit(spec.window, spec.q, cfg.t, {cfg.seed, i}), a.k, a.j, cfg.margin);
    });
    report = mean_estimate(v, "density(k=" + std::to_string(a.k) + ",j=" + std::to_string(a.j) + ")");
  } else {
    const Weighting w = parse_weighting(a.mode);
    std::function<double(const MaximalSegment&)> value;
    std::string name = a.stat;
    if (a.stat == "p_internal") {
      value = [n = a.n](const MaximalSegment& s) { return s.internal_vertices == n ? 1.0 : 0.0; };
      name += "(" + std::to_string(a.n) + ")";
    } else if (a.stat == "mean_internal") {
      value = [](const MaximalSegment& s) { return static_cast<double>(s.internal_vertices); };
    } else if (a.stat == "mean_length") {
      value = [](const MaximalSegment& s) { return s.length; };
    } else if (a.stat == "mean_last_birth_time") {
      value = [](const MaximalSegment& s) { return s.birth_times.back(); };
    } else {
      throw UsageError("unknown statistic '" + a.stat +
                       "' (p_internal, mean_internal, mean_length, mean_last_birth_time, density)");
    }
    const auto terms = mc_run(spec, cfg.threads, [&](const Tessellation& tess, std::size_t) {
      RatioTerm r;
      for (const auto& s : minus_sample(maximal_segments(tess), tess.window, cfg.margin)) {
        const double wt = weight_of(s, w);
        r.numerator += wt * value(s);
        r.denominator += wt;
        r.count += 1.0;
        r.weight_sq += wt * wt;
      }
      return r;
    });
    double total = 0.0;
    for (const auto& r : terms) total += r.count;
    if (total == 0.0) throw std::runtime_error("no interior segments; enlarge t or window");
    report = ratio_estimate(terms, name, to_string(w));
  }

  if (cfg.format == "table") {
    emit(cfg, report.statistic + " " + report.mode + " estimate=" + fixed(report.estimate) +
                  " se=" + fixed(report.std_error) + " ci95=[" + fixed(report.ci_low) + "," + fixed(report.ci_high) +
                  "] n_eff=" + fixed(report.effective_n, 1) + " replicates=" + std::to_string(report.replicates) + "\n");
  } else if (cfg.format == "csv") {
    emit(cfg, "statistic,mode,estimate,std_error,ci_low,ci_high,effective_n,replicates\n" + report.statistic + "," +
                  report.mode + "," + fixed(report.estimate, 10) + "," + fixed(report.std_error, 10) + "," +
                  fixed(report.ci_low, 10) + "," + fixed(report.ci_high, 10) + "," + fixed(report.effective_n, 3) +
                  "," + std::to_string(report.replicates) + "\n");
  } else {
    emit(cfg, dump(Json{{"config", cfg.to_json()}, {"estimate", to_json(report)}}));
  }
  return 0;
}

// ---- analytic --------------------------------------------------------------

struct AnalyticArgs {
  std::string what;
  std::string mode = "typical";
  std::string n = "0";
  bool exact = false;
  int k = 1;
  int j = 0;
  std::vector<double> at;
};

int cmd_analytic(const RunConfig& cfg, const AnalyticArgs& a) {
  cfg.validate(false);
  Json result;
  std::ostringstream table;

  if (a.what == "p" || a.what == "series") {
    const SegmentMode mode = parse_segment_mode(a.mode);
    const auto ns = parse_range(a.what == "series" && a.n == "0" ? std::string("0..10") : a.n);
    const int n_max = *std::max_element(ns.begin(), ns.end());
    const auto s = p_internal_series(cfg.d, mode, n_max, cfg.t);
    Json rows = Json::array();
    table << "n p\n";
    for (int n : ns) {
      Json row{{"n", n}, {"p", s.p[n]}};
      if (a.exact)
        if (const auto e = exact_p_internal(cfg.d, mode, n)) row["exact"] = Json{{"expression", e->expression}, {"value", e->value}};
      rows.push_back(row);
      table << n << ' ' << fixed(s.p[n]) << '\n';
    }
    result = Json{{"quantity", "p_internal"}, {"mode", to_string(mode)}, {"values", rows}};
    if (a.what == "series") {
      result["mass"] = s.mass;
      result["mass_tail"] = s.mass_tail;
      result["mean_head"] = s.mean_head;
      result["mean_tail"] = s.mean_tail;
    }
  } else if (a.what == "mean") {
    const SegmentMode mode = parse_segment_mode(a.mode);
    const double m = mean_internal(cfg.d, mode);
    result = Json{{"quantity", "mean_internal"}, {"mode", to_string(mode)}};
    result["value"] = std::isinf(m) ? Json("infinite") : Json(m);
    table << fixed(m) << '\n';
  } else if (a.what == "density") {
    const BirthTimeLaw law{cfg.d, a.k, a.j, cfg.t};
    law.validate();
    const double v = birth_time_density(law, a.at);
    result = Json{{"quantity", "birth_time_density"}, {"k", a.k}, {"j", a.j}, {"at", a.at}, {"value", v}};
    table << fixed(v) << '\n';
  } else if (a.what == "mixture") {
    Vec e1 = Vec::Zero();
    e1[0] = 1.0;
    const double lambda_u = lambda_of_segment(cfg.direction(), e1);
    Json rows = Json::array();
    table << "x density cdf\n";
    for (double x : a.at) {
      const double f = mixture_length_density(cfg.d, a.j, cfg.t, lambda_u, x);
      const double F = mixture_length_cdf(cfg.d, a.j, cfg.t, lambda_u, x);
      rows.push_back(Json{{"x", x}, {"density", f}, {"cdf", F}});
      table << fixed(x) << ' ' << fixed(f) << ' ' << fixed(F) << '\n';
    }
    result = Json{{"quantity", "mixture_length"}, {"j", a.j}, {"lambda_u", lambda_u}, {"values", rows}};
  } else {
    throw UsageError("analytic needs one of: p, series, mean, density, mixture");
  }

  if (cfg.format == "json")
    emit(cfg, dump(Json{{"config", cfg.to_json()}, {"result", result}}));
  else
    emit(cfg, table.str());
  return 0;
}

// ---- verify ----------------------------------------------------------------

int cmd_verify(const RunConfig& cfg, const std::string& suite) {
  VerifyOptions opts;
  opts.suite = parse_suite(suite);
  opts.seed = cfg.seed;
  opts.threads = cfg.threads;
  const auto report = run_verify(opts);
  std::cout << report.summary_text() << std::flush;
  if (!cfg.out.empty()) {
    Json j = report.summary_json();
    j["config"] = Json{{"suite", suite}, {"seed", cfg.seed}, {"version", kVersion}};
    emit(cfg, dump(j));
  }
  return report.all_pass() ? 0 : 1;
}

// ---- render ----------------------------------------------------------------

struct RenderArgs {
  std::string in;
  int frames = 1;
  double dashed_after = -1.0;
  double size = 480;
};

Json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read " + path);
  return Json::parse(f);
}

Tessellation first_tessellation(const Json& j) {
  if (j.contains("tessellation")) return tessellation_from_json(j.at("tessellation"));
  if (j.contains("tessellations")) return tessellation_from_json(j.at("tessellations").at(0));
  return tessellation_from_json(j);
}

int cmd_render(const RunConfig& cfg, const RenderArgs& a) {
  const Tessellation tess = first_tessellation(read_json(a.in));
  emit(cfg, render_svg(tess, SvgOptions{a.size, a.dashed_after, a.frames}));
  return 0;
}

// ---- linesection -----------------------------------------------------------

struct LineArgs {
  std::string in;
  std::vector<double> base;
  std::vector<double> dir;
};

int cmd_linesection(const RunConfig& cfg, const LineArgs& a) {
  Tessellation tess;
  if (!a.in.empty()) {
    tess = first_tessellation(read_json(a.in));
  } else {
    cfg.validate(true);
    tess = simulate_stit(cfg.window_polytope(), cfg.direction(), cfg.t, {cfg.seed, 0});
  }
  const int d = tess.dim();
  const auto [lo, hi] = tess.window.bounds();
  Vec base = 0.5 * (lo + hi);
  Vec u = Vec::Zero();
  u[0] = 1.0;
  if (!a.base.empty()) base = vec_of(a.base, d, "--base");
  if (!a.dir.empty()) u = vec_of(a.dir, d, "--dir");
  if (!(u.norm() > 0.0)) throw UsageError("--dir must be nonzero");
  u /= u.norm();
  const auto [length, entry] = window_chord(tess.window, base, u);
  const auto points = line_section(tess, base, u);
  const double expected = tess.horizon * lambda_of_segment(tess.q, u) * length;

  if (cfg.format == "json") {
    emit(cfg, dump(Json{{"config", cfg.to_json()},
                        {"base", to_json(base, d)},
                        {"direction", to_json(u, d)},
                        {"chord", Json{{"entry", entry}, {"length", length}}},
                        {"points", points},
                        {"expected_count", expected}}));
  } else {
    std::ostringstream os;
    os << "tau\n";
    for (double p : points) os << fixed(p, 10) << '\n';
    emit(cfg, os.str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"STIT tessellation simulator and analytic toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(kVersion));
  app.set_config("--config", "", "key = value configuration file; flags override it");

  RunConfig cfg;
  app.add_option("-d,--dim", cfg.d, "space dimension");
  app.add_option("--window", cfg.window, "box side lengths (one value or d values)")->delimiter(',');
  app.add_option("-Q,--directions", cfg.q, "isotropic | axis | discrete:[((n...),w),...]");
  app.add_option("-t,--time", cfg.t, "time horizon");
  app.add_option("--seed", cfg.seed, "master seed");
  app.add_option("--replicates", cfg.replicates, "Monte Carlo replicates");
  app.add_option("--margin", cfg.margin, "minus-sampling margin, fraction of each side");
  app.add_option("--threads", cfg.threads, "worker threads");
  app.add_option("--out", cfg.out, "output file (default stdout)");
  app.add_option("--format", cfg.format, "json | csv | table");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "simulate a STIT (or PHT) tessellation");
  simulate->add_flag("--pht", sim.pht, "Poisson hyperplane tessellation instead");
  simulate->add_flag("--svg", sim.svg, "also render an SVG (d = 2)");
  simulate->add_option("--svg-out", sim.svg_out, "SVG path (default <out>.svg or tessellation.svg)");

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "Monte Carlo estimate over minus-sampled maximal segments");
  estimate->add_option("--stat", est.stat,
                       "p_internal | mean_internal | mean_length | mean_last_birth_time | density")
      ->required();
  estimate->add_option("--mode", est.mode, "typical | lengthweighted");
  estimate->add_option("--n", est.n, "internal-vertex count for p_internal");
  estimate->add_option("-k", est.k, "density: polytope dimension");
  estimate->add_option("-j", est.j, "density: intrinsic volume index");

  AnalyticArgs an;
  auto* analytic = app.add_subcommand("analytic", "analytic laws");
  analytic->add_option("what", an.what, "p | series | mean | density | mixture")->required();
  analytic->add_option("--mode", an.mode, "typical | lengthweighted");
  analytic->add_option("--n", an.n, "n, list a,b,c or range a..b");
  analytic->add_flag("--exact", an.exact, "include known closed forms");
  analytic->add_option("-k", an.k, "polytope dimension");
  analytic->add_option("-j", an.j, "intrinsic volume index");
  analytic->add_option("--at", an.at, "evaluation point(s)")->delimiter(',');

  std::string suite = "quick";
  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  verify->add_option("suite", suite, "quick | full")->check(CLI::IsMember({"quick", "full"}));

  RenderArgs ren;
  auto* render = app.add_subcommand("render", "render a tessellation JSON file as SVG (d = 2)");
  render->add_option("--in", ren.in, "tessellation JSON")->required();
  render->add_option("--frames", ren.frames, "number of time frames side by side");
  render->add_option("--dashed-after", ren.dashed_after, "dash chords born after this time (single frame)");
  render->add_option("--size", ren.size, "frame size in pixels");

  LineArgs line;
  auto* linesection = app.add_subcommand("linesection", "intersect a tessellation with a line");
  linesection->add_option("--in", line.in, "tessellation JSON (default: simulate from the config)");
  linesection->add_option("--base", line.base, "point on the line (default window centre)")->delimiter(',');
  linesection->add_option("--dir", line.dir, "line direction (default e1)")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(cfg, sim);
    if (estimate->parsed()) return cmd_estimate(cfg, est);
    if (analytic->parsed()) return cmd_analytic(cfg, an);
    if (verify->parsed()) return cmd_verify(cfg, suite);
    if (render->parsed()) return cmd_render(cfg, ren);
    if (linesection->parsed()) return cmd_linesection(cfg, line);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

#include "stit/config.hpp"

#include <cmath>

namespace stit {

void RunConfig::validate(bool simulation) const {
  if (d < 2) throw ConfigError("d must be >= 2");
  if (simulation && d != 2 && d != 3) throw ConfigError("simulation supports d = 2 or d = 3 only");
  if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("t must be positive");
  if (replicates < 1) throw ConfigError("replicates must be >= 1");
  if (!(margin >= 0.0 && margin < 0.5)) throw ConfigError("margin must lie in [0, 1/2)");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (format != "json" && format != "csv" && format != "table") throw ConfigError("format must be json, csv or table");
  if (!window.empty() && static_cast<int>(window.size()) != d && window.size() != 1)
    throw ConfigError("window needs one side length or d side lengths");
  for (double s : window)
    if (!(s > 0.0)) throw ConfigError("window sides must be positive");
  if (simulation) {
    try {
      direction();
    } catch (const MeasureError& e) {
      throw ConfigError(e.what());
    }
  }
}

std::vector<double> RunConfig::sides() const {
  if (window.empty()) return std::vector<double>(d, 1.0);
  if (window.size() == 1) return std::vector<double>(d, window.front());
  return window;
}

ConvexPolytope RunConfig::window_polytope() const {
  const auto s = sides();
  return ConvexPolytope::box(s);
}

DirectionalDistribution RunConfig::direction() const { return DirectionalDistribution::parse(q, d); }

Json RunConfig::to_json() const {
  return Json{{"d", d},           {"window", sides()},   {"Q", q},
              {"t", t},           {"seed", seed},        {"replicates", replicates},
              {"margin", margin}, {"threads", threads},  {"format", format},
              {"version", kVersion}};
}

}  // namespace stit

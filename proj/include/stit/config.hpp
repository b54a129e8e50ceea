#pragma once

// Resolved run configuration shared by all subcommands. Values come from
// defaults, then an optional key = value config file, then command-line flags.

#include "stit/geometry.hpp"
#include "stit/io.hpp"
#include "stit/measure.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace stit {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  int d = 2;
  std::vector<double> window;  // box side lengths; empty means the unit box
  std::string q = "isotropic";
  double t = 1.0;
  std::uint64_t seed = 1;
  std::size_t replicates = 1;
  double margin = 0.15;
  int threads = 1;
  std::string out;
  std::string format = "json";

  // Throws ConfigError. Simulation commands need d in {2, 3}.
  void validate(bool simulation) const;

  std::vector<double> sides() const;
  ConvexPolytope window_polytope() const;  // [0, side_1] x ... x [0, side_d]
  DirectionalDistribution direction() const;
  Json to_json() const;
};

}  // namespace stit

#pragma once

// The acceptance suite: twelve criteria comparing simulation with the analytic
// laws. `quick` runs every criterion at reduced replicate counts.

#include "stit/io.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace stit {

enum class Suite { quick, full };

Suite parse_suite(const std::string& text);
const char* to_string(Suite suite);

struct Check {
  std::string name;
  bool pass = false;
  double estimate = 0.0;
  double target = 0.0;
  std::string tolerance;
  std::string note;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<Check> checks;

  bool pass() const;
  std::string line() const;  // "PASS C4 ..." one line
};

// A goodness-of-fit p-value entering the Holm family.
struct FamilyMember {
  int criterion = 0;
  std::string name;
  GofReport report;
  double adjusted = 1.0;
};

struct VerifyOptions {
  Suite suite = Suite::quick;
  std::uint64_t seed = 1;
  int threads = 1;
  double family_level = 0.01;
  bool determinism_check = true;  // criterion 12 reruns the quick suite
};

struct VerifyReport {
  std::vector<CriterionResult> criteria;
  std::vector<FamilyMember> family;
  bool all_pass() const;
  std::string summary_text() const;  // one line per criterion
  Json summary_json() const;
  Suite suite = Suite::quick;
  std::uint64_t seed = 1;
};

VerifyReport run_verify(const VerifyOptions& opts);

// Expected value of the plain minus-sampled ratio estimators when every
// segment must fit inside a box of side a: the segment laws of the whole
// space tilted by the fraction of translates that fit. `isotropic` selects
// uniformly distributed planar directions (d = 2 only); otherwise
// axis-parallel segments.
struct WindowPrediction {
  double p0 = 0.0;
  double p1 = 0.0;
  double mean = 0.0;
};
WindowPrediction window_truncated_prediction(int d, int j, double t, double a, double lambda_u, bool isotropic);

}  // namespace stit

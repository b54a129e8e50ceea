#include "stit/rng.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace stit {

std::uint64_t mix64(std::uint64_t x) {
  // Stafford variant 13 finalizer (as in SplitMix64).
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

StreamKey StreamKey::root(std::uint64_t seed, std::uint64_t replicate) {
  const std::uint64_t s = mix64(seed + 0x9e3779b97f4a7c15ULL);
  return StreamKey(mix64(s ^ mix64(replicate ^ 0xd1b54a32d192ed03ULL)));
}

StreamKey StreamKey::child(std::uint64_t branch) const {
  return StreamKey(mix64(value_ ^ mix64(branch + 0x632be59bd9b4e019ULL)) + 0x9e3779b97f4a7c15ULL);
}

Stream::result_type Stream::operator()() {
  const std::uint64_t c = counter_++;
  return mix64(key_ ^ mix64(c * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL));
}

double Stream::uniform() {
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double Stream::exponential(double rate) { return -std::log(uniform()) / rate; }

double Stream::normal() {
  // Box-Muller; one variate per call keeps the stream stateless between calls.
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Stream::poisson(double mean) {
  if (mean <= 0.0) return 0;
  std::poisson_distribution<std::uint64_t> dist(mean);
  return dist(*this);
}

}  // namespace stit

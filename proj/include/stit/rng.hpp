#pragma once

#include <cstdint>
#include <limits>

namespace stit {

// Counter-based random streams. A stream is fully determined by its key, so
// results never depend on the order in which streams are consumed. Keys are
// derived hierarchically: (master seed, replicate) -> cell lineage path.
class StreamKey {
 public:
  StreamKey() = default;
  static StreamKey root(std::uint64_t seed, std::uint64_t replicate);
  static StreamKey from_value(std::uint64_t v) { return StreamKey(v); }

  // Key of an independent sub-stream (child cell, inner iteration, ...).
  StreamKey child(std::uint64_t branch) const;

  std::uint64_t value() const { return value_; }

  friend bool operator==(StreamKey, StreamKey) = default;

 private:
  explicit StreamKey(std::uint64_t v) : value_(v) {}
  std::uint64_t value_ = 0;
};

// Satisfies std::uniform_random_bit_generator.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(StreamKey key) : key_(key.value()) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  // Uniform on the open interval (0, 1).
  double uniform();
  double exponential(double rate);
  double normal();
  std::uint64_t poisson(double mean);

  std::uint64_t draws() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace stit

#pragma once

#include <cstdint>
#include <limits>

#include "ofdmgen/types.hpp"

namespace ofdmgen {

/// Independent substreams drawn for each waveform.
enum class Stream : std::uint64_t {
  bits = 1,
  noise = 2,
  channel = 3,
  test = 99,
};

/// Counter-based generator (SplitMix64 output function over an incrementing
/// counter). A stream is keyed by (seed, index, stream id), so waveform i of a
/// dataset draws the same numbers no matter which thread produces it.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t key) : counter_(key) {}
  Rng(std::uint64_t seed, std::uint64_t index, Stream stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on [0, 1).
  double uniform();
  /// Standard normal via Box-Muller; the spare value is cached.
  double normal();
  /// Circular complex Gaussian with E|z|^2 = 1.
  Complex complex_normal();

 private:
  std::uint64_t counter_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace ofdmgen

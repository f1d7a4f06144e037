#pragma once

#include <cstdint>
#include <limits>

namespace kaclab {

/// Counter-based random stream: the n-th output is a bijective mix of
/// (stream origin + n * golden gamma). Streams are addressed by
/// (master seed, stream id) so every replica owns an independent,
/// reproducible sequence regardless of execution order.
///
/// Satisfies UniformRandomBitGenerator. The variate helpers are implemented
/// here rather than through <random> distributions so output is identical
/// across standard library implementations.
class StreamRng
{
 public:
  using result_type = std::uint64_t;

  StreamRng(std::uint64_t master_seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1].
  double uniform_open_zero();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  double exponential(double rate);
  /// Standard normal (Box-Muller, second variate cached).
  double normal();

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t origin_;
  std::uint64_t counter_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

}  // namespace kaclab

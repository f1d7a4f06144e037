#include "kaclab/rng.hpp"

#include <cmath>
#include <numbers>

namespace kaclab {

namespace {
constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t mix64(std::uint64_t x)
{
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

StreamRng::StreamRng(std::uint64_t master_seed, std::uint64_t stream_id)
    : origin_(mix64(mix64(master_seed ^ 0x6a09e667f3bcc909ULL) + mix64(stream_id + kGamma)))
{
}

StreamRng::result_type StreamRng::operator()()
{
  ++counter_;
  return mix64(origin_ + counter_ * kGamma);
}

double StreamRng::uniform()
{
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double StreamRng::uniform_open_zero()
{
  return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53;
}

std::uint64_t StreamRng::below(std::uint64_t n)
{
  // Lemire's multiply-shift with rejection; unbiased.
  std::uint64_t x = (*this)();
  __uint128_t m = static_cast<__uint128_t>(x) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      x = (*this)();
      m = static_cast<__uint128_t>(x) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double StreamRng::exponential(double rate)
{
  return -std::log(uniform_open_zero()) / rate;
}

double StreamRng::normal()
{
  if (has_cached_) {
    has_cached_ = false;
    return cached_normal_;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform_open_zero()));
  const double phi = 2.0 * std::numbers::pi * uniform();
  cached_normal_ = r * std::sin(phi);
  has_cached_ = true;
  return r * std::cos(phi);
}

}  // namespace kaclab

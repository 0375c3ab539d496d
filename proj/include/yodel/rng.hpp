#ifndef YODEL_RNG_HPP
#define YODEL_RNG_HPP

#include "yodel/yni.hpp"

#include <cstdint>
#include <random>
#include <string_view>

namespace yodel {

/// SplitMix64 finalizer; used to derive independent seeds.
constexpr std::uint64_t
mix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t
hashBytes(std::uint64_t seed, ByteSpan bytes);

std::uint64_t
hashString(std::uint64_t seed, std::string_view s);

/**
 * \brief Per-node pseudo-random stream.
 *
 * Each node forks its own stream from (run seed, node Yni), so the draws a
 * node sees do not depend on how other nodes' events interleave.
 */
class Rng
{
public:
  explicit
  Rng(std::uint64_t seed)
    : m_engine(mix64(seed))
  {
  }

  static Rng
  fork(std::uint64_t seed, const Yni& node)
  {
    return Rng(hashBytes(seed, node.octets()));
  }

  std::uint64_t
  next()
  {
    return m_engine();
  }

  /// Uniform in [0, 1) with 53 bits of precision.
  double
  uniform()
  {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  bool
  bernoulli(double p)
  {
    return uniform() < p;
  }

  /// Uniform in [0, n); n must be nonzero.
  std::size_t
  below(std::size_t n)
  {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n));
  }

private:
  std::mt19937_64 m_engine;
};

} // namespace yodel

#endif // YODEL_RNG_HPP

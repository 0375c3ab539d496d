#ifndef YODEL_YNI_HPP
#define YODEL_YNI_HPP

#include "yodel/bytes.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace yodel {

using MacAddress = std::array<std::uint8_t, 6>;

/// A pseudo-MAC taken from a real interface.
struct HardwareMac
{
  MacAddress mac;
};

/// A pseudo-MAC drawn from a generator seeded with @c seed.
struct SeededRandomMac
{
  std::uint64_t seed;
};

using MacSource = std::variant<HardwareMac, SeededRandomMac>;

/**
 * \brief Yodel Node ID, the 10-byte layer-3.5 address of every node.
 *
 * Bytes 0-5 hold the pseudo-MAC, bytes 6-9 the big-endian Unix time in
 * seconds at which the node generated its address. Equality and ordering
 * are bytewise; every deterministic tie-break in the system relies on it.
 */
class Yni
{
public:
  static constexpr std::size_t WIDTH = 10;
  using Octets = std::array<std::uint8_t, WIDTH>;

  class MalformedText : public std::invalid_argument
  {
  public:
    using std::invalid_argument::invalid_argument;
  };

  constexpr
  Yni() = default;

  constexpr explicit
  Yni(const Octets& octets)
    : m_octets(octets)
  {
  }

  Yni(const MacAddress& mac, std::uint32_t epochSeconds);

  static Yni
  generate(const MacSource& source, std::uint32_t now);

  /// Parses the canonical "xxxx:xxxx:xxxx:xxxx:xxxx" form.
  static Yni
  parse(std::string_view text);

  static Yni
  fromBytes(ByteSpan bytes);

  std::string
  toString() const;

  MacAddress
  mac() const;

  std::uint32_t
  epochSeconds() const;

  const Octets&
  octets() const
  {
    return m_octets;
  }

  void
  writeTo(ByteWriter& w) const
  {
    w.raw(m_octets);
  }

  bool
  isZero() const
  {
    return *this == Yni();
  }

  friend auto operator<=>(const Yni&, const Yni&) = default;

private:
  Octets m_octets{};
};

std::ostream&
operator<<(std::ostream& os, const Yni& yni);

} // namespace yodel

template<>
struct std::hash<yodel::Yni>
{
  std::size_t
  operator()(const yodel::Yni& y) const noexcept
  {
    std::size_t h = 1469598103934665603ULL;
    for (auto b : y.octets())
      h = (h ^ b) * 1099511628211ULL;
    return h;
  }
};

#endif // YODEL_YNI_HPP

#include "yodel/yni.hpp"
#include "yodel/rng.hpp"

#include <ostream>

namespace yodel {

Yni::Yni(const MacAddress& mac, std::uint32_t epochSeconds)
{
  for (std::size_t i = 0; i < mac.size(); ++i)
    m_octets[i] = mac[i];
  m_octets[6] = static_cast<std::uint8_t>(epochSeconds >> 24);
  m_octets[7] = static_cast<std::uint8_t>(epochSeconds >> 16);
  m_octets[8] = static_cast<std::uint8_t>(epochSeconds >> 8);
  m_octets[9] = static_cast<std::uint8_t>(epochSeconds);
}

Yni
Yni::generate(const MacSource& source, std::uint32_t now)
{
  if (auto* hw = std::get_if<HardwareMac>(&source))
    return Yni(hw->mac, now);

  Rng rng(std::get<SeededRandomMac>(source).seed);
  std::uint64_t draw = rng.next();
  MacAddress mac;
  for (std::size_t i = 0; i < mac.size(); ++i)
    mac[i] = static_cast<std::uint8_t>(draw >> (8 * i));
  // locally administered, unicast
  mac[0] = static_cast<std::uint8_t>((mac[0] | 0x02) & ~0x01);
  return Yni(mac, now);
}

static int
hexDigit(char c)
{
  if (c >= '0' && c <= '9')
    return c - '0';
  if (c >= 'a' && c <= 'f')
    return c - 'a' + 10;
  if (c >= 'A' && c <= 'F')
    return c - 'A' + 10;
  return -1;
}

Yni
Yni::parse(std::string_view text)
{
  // five groups of four hex digits separated by ':'
  if (text.size() != 24)
    throw MalformedText("YNI text must be five colon-separated groups of four hex digits");
  Octets octets{};
  for (std::size_t group = 0; group < 5; ++group) {
    std::size_t base = group * 5;
    if (group > 0 && text[base - 1] != ':')
      throw MalformedText("YNI groups must be separated by ':'");
    int nibbles[4];
    for (std::size_t k = 0; k < 4; ++k) {
      nibbles[k] = hexDigit(text[base + k]);
      if (nibbles[k] < 0)
        throw MalformedText("non-hex character in YNI text");
    }
    octets[group * 2] = static_cast<std::uint8_t>((nibbles[0] << 4) | nibbles[1]);
    octets[group * 2 + 1] = static_cast<std::uint8_t>((nibbles[2] << 4) | nibbles[3]);
  }
  return Yni(octets);
}

Yni
Yni::fromBytes(ByteSpan bytes)
{
  if (bytes.size() != WIDTH)
    throw std::invalid_argument("YNI must be exactly 10 bytes");
  Octets octets;
  std::copy(bytes.begin(), bytes.end(), octets.begin());
  return Yni(octets);
}

std::string
Yni::toString() const
{
  static constexpr char DIGITS[] = "0123456789abcdef";
  std::string out;
  out.reserve(24);
  for (std::size_t i = 0; i < WIDTH; ++i) {
    if (i > 0 && i % 2 == 0)
      out.push_back(':');
    out.push_back(DIGITS[m_octets[i] >> 4]);
    out.push_back(DIGITS[m_octets[i] & 0x0f]);
  }
  return out;
}

MacAddress
Yni::mac() const
{
  MacAddress mac;
  std::copy_n(m_octets.begin(), mac.size(), mac.begin());
  return mac;
}

std::uint32_t
Yni::epochSeconds() const
{
  return (std::uint32_t(m_octets[6]) << 24) | (std::uint32_t(m_octets[7]) << 16) |
         (std::uint32_t(m_octets[8]) << 8) | std::uint32_t(m_octets[9]);
}

std::ostream&
operator<<(std::ostream& os, const Yni& yni)
{
  return os << yni.toString();
}

} // namespace yodel

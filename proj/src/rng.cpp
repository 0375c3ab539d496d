#include "yodel/rng.hpp"

namespace yodel {

std::uint64_t
hashBytes(std::uint64_t seed, ByteSpan bytes)
{
  std::uint64_t h = mix64(seed);
  for (auto b : bytes)
    h = mix64(h ^ b);
  return h;
}

std::uint64_t
hashString(std::uint64_t seed, std::string_view s)
{
  std::uint64_t h = mix64(seed);
  for (char c : s)
    h = mix64(h ^ static_cast<std::uint8_t>(c));
  return h;
}

} // namespace yodel

#include "yodel/bytes.hpp"

namespace yodel {

std::string
toHex(ByteSpan data)
{
  static constexpr char DIGITS[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (auto b : data) {
    out.push_back(DIGITS[b >> 4]);
    out.push_back(DIGITS[b & 0x0f]);
  }
  return out;
}

static int
hexValue(char c)
{
  if (c >= '0' && c <= '9')
    return c - '0';
  if (c >= 'a' && c <= 'f')
    return c - 'a' + 10;
  if (c >= 'A' && c <= 'F')
    return c - 'A' + 10;
  return -1;
}

Bytes
fromHex(std::string_view hex)
{
  Bytes out;
  int hi = -1;
  for (char c : hex) {
    if (c == ' ' || c == '\n' || c == '\t' || c == '\r')
      continue;
    int v = hexValue(c);
    if (v < 0)
      throw std::invalid_argument("non-hex character in input");
    if (hi < 0) {
      hi = v;
    }
    else {
      out.push_back(static_cast<std::uint8_t>((hi << 4) | v));
      hi = -1;
    }
  }
  if (hi >= 0)
    throw std::invalid_argument("odd number of hex digits");
  return out;
}

} // namespace yodel

#ifndef YODEL_BYTES_HPP
#define YODEL_BYTES_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace yodel {

using Bytes = std::vector<std::uint8_t>;
using ByteSpan = std::span<const std::uint8_t>;

/// Appends big-endian integers and raw octets to a growing buffer.
class ByteWriter
{
public:
  void
  u8(std::uint8_t v)
  {
    m_buf.push_back(v);
  }

  void
  u16(std::uint16_t v)
  {
    u8(static_cast<std::uint8_t>(v >> 8));
    u8(static_cast<std::uint8_t>(v));
  }

  void
  u32(std::uint32_t v)
  {
    for (int shift = 24; shift >= 0; shift -= 8)
      u8(static_cast<std::uint8_t>(v >> shift));
  }

  void
  u64(std::uint64_t v)
  {
    for (int shift = 56; shift >= 0; shift -= 8)
      u8(static_cast<std::uint8_t>(v >> shift));
  }

  void
  raw(ByteSpan data)
  {
    m_buf.insert(m_buf.end(), data.begin(), data.end());
  }

  void
  str(std::string_view s)
  {
    m_buf.insert(m_buf.end(), s.begin(), s.end());
  }

  std::size_t
  size() const
  {
    return m_buf.size();
  }

  Bytes&
  buffer()
  {
    return m_buf;
  }

  Bytes
  take()
  {
    return std::move(m_buf);
  }

private:
  Bytes m_buf;
};

/// Thrown by ByteReader when a read runs past the end of input.
class TruncatedInput : public std::runtime_error
{
public:
  TruncatedInput()
    : std::runtime_error("truncated input")
  {
  }
};

/// Bounds-checked big-endian cursor over a byte span.
class ByteReader
{
public:
  explicit
  ByteReader(ByteSpan data)
    : m_data(data)
  {
  }

  std::uint8_t
  u8()
  {
    need(1);
    return m_data[m_pos++];
  }

  std::uint16_t
  u16()
  {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>((m_data[m_pos] << 8) | m_data[m_pos + 1]);
    m_pos += 2;
    return v;
  }

  std::uint32_t
  u32()
  {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v = (v << 8) | m_data[m_pos++];
    return v;
  }

  std::uint64_t
  u64()
  {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v = (v << 8) | m_data[m_pos++];
    return v;
  }

  ByteSpan
  raw(std::size_t n)
  {
    need(n);
    auto out = m_data.subspan(m_pos, n);
    m_pos += n;
    return out;
  }

  std::string
  str(std::size_t n)
  {
    auto s = raw(n);
    return std::string(s.begin(), s.end());
  }

  std::size_t
  remaining() const
  {
    return m_data.size() - m_pos;
  }

  std::size_t
  position() const
  {
    return m_pos;
  }

private:
  void
  need(std::size_t n) const
  {
    if (m_data.size() - m_pos < n)
      throw TruncatedInput();
  }

private:
  ByteSpan m_data;
  std::size_t m_pos = 0;
};

std::string
toHex(ByteSpan data);

Bytes
fromHex(std::string_view hex);

} // namespace yodel

#endif // YODEL_BYTES_HPP

#ifndef YODEL_CODEC_HPP
#define YODEL_CODEC_HPP

#include "yodel/bytes.hpp"
#include "yodel/yni.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace yodel {

enum class MessageKind : std::uint8_t {
  ControlYpp = 0x01,
  DataYpp = 0x02,
  DataYsync = 0x03,
  AnycastDataYsync = 0x04,
  AnycastDataYpp = 0x05,
};

constexpr bool
isYsync(MessageKind k)
{
  return k == MessageKind::DataYsync || k == MessageKind::AnycastDataYsync;
}

constexpr bool
isAnycastKind(MessageKind k)
{
  return k == MessageKind::AnycastDataYsync || k == MessageKind::AnycastDataYpp;
}

constexpr bool
isDataKind(MessageKind k)
{
  return k != MessageKind::ControlYpp;
}

std::string
toString(MessageKind k);

enum class TlvTag : std::uint8_t {
  ValleyId = 0x01,
  ChannelId = 0x02,
  NamespaceId = 0x03,
  ApplicationId = 0x04,
  Metadata = 0x05,
  PathTree = 0x06,
};

/**
 * \brief Source-routed forwarding tree carried in YSync headers.
 *
 * Serialized in preorder as the node YNI (10 bytes), a one-byte child count
 * and then each child subtree.
 */
struct PathTree
{
  Yni yni;
  std::vector<PathTree> children;

  bool
  isLeaf() const
  {
    return children.empty();
  }

  std::size_t
  nodeCount() const;

  /// Preorder list of node YNIs.
  std::vector<Yni>
  nodes() const;

  /// Directed (parent, child) pairs.
  std::vector<std::pair<Yni, Yni>>
  edges() const;

  std::vector<Yni>
  leaves() const;

  bool
  contains(const Yni& y) const;

  /// True when no YNI appears twice.
  bool
  isLoopFree() const;

  std::size_t
  serializedSize() const;

  void
  writeTo(ByteWriter& w) const;

  static PathTree
  readFrom(ByteReader& r);

  friend bool operator==(const PathTree&, const PathTree&) = default;
};

struct FixedHeader
{
  static constexpr std::size_t WIDTH = 27;

  MessageKind kind = MessageKind::DataYpp;
  Yni sender;
  Yni receiver;
  std::uint16_t floatingLen = 0;
  std::uint32_t payloadLen = 0;

  friend bool operator==(const FixedHeader&, const FixedHeader&) = default;
};

/// The TLV element set; each element appears at most once and is encoded in
/// ascending tag order.
struct FloatingHeader
{
  std::optional<std::uint32_t> valleyId;
  std::optional<std::uint64_t> channelId;
  std::optional<std::uint32_t> namespaceId;
  std::optional<std::uint32_t> applicationId;
  std::optional<Bytes> metadata;
  std::optional<PathTree> pathTree;

  bool
  empty() const
  {
    return !valleyId && !channelId && !namespaceId && !applicationId && !metadata && !pathTree;
  }

  std::size_t
  elementCount() const;

  std::size_t
  serializedSize() const;

  friend bool operator==(const FloatingHeader&, const FloatingHeader&) = default;
};

struct YodelMessage
{
  FixedHeader fixed;
  FloatingHeader floating;
  Bytes data;

  /// Recomputes floatingLen and payloadLen from the contents.
  YodelMessage&
  finalize();

  friend bool operator==(const YodelMessage&, const YodelMessage&) = default;
};

class CodecError : public std::runtime_error
{
public:
  enum class Code {
    InvariantViolation,
    TruncatedMessage,
    UnknownKind,
    UnknownTag,
    DuplicateTlv,
    LengthMismatch,
    RootMismatch,
  };

  CodecError(Code code, const std::string& what)
    : std::runtime_error(what)
    , m_code(code)
  {
  }

  Code
  code() const
  {
    return m_code;
  }

private:
  Code m_code;
};

/// Throws CodecError::InvariantViolation when the element set is not allowed
/// for the message kind.
void
checkInvariants(const YodelMessage& msg);

Bytes
encode(const YodelMessage& msg);

YodelMessage
decode(ByteSpan bytes);

/**
 * \brief Segment-routing pop at @p self.
 *
 * Returns one message per child of the path-tree root, each carrying that
 * child's subtree with sender=self and receiver=child. An empty result means
 * @p self is a delivery leaf.
 */
std::vector<std::pair<Yni, YodelMessage>>
popPathRoot(const YodelMessage& msg, const Yni& self);

} // namespace yodel

#endif // YODEL_CODEC_HPP

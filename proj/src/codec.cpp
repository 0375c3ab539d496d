#include "yodel/codec.hpp"

#include <functional>
#include <set>

namespace yodel {

using Code = CodecError::Code;

namespace {

constexpr std::size_t TLV_OVERHEAD = 3;
constexpr std::size_t MAX_TLV_VALUE = 0xffff;

void
collectNodes(const PathTree& t, std::vector<Yni>& out)
{
  out.push_back(t.yni);
  for (const auto& c : t.children)
    collectNodes(c, out);
}

void
collectEdges(const PathTree& t, std::vector<std::pair<Yni, Yni>>& out)
{
  for (const auto& c : t.children) {
    out.emplace_back(t.yni, c.yni);
    collectEdges(c, out);
  }
}

void
collectLeaves(const PathTree& t, std::vector<Yni>& out)
{
  if (t.isLeaf())
    out.push_back(t.yni);
  for (const auto& c : t.children)
    collectLeaves(c, out);
}

bool
anyWideFanOut(const PathTree& t)
{
  if (t.children.size() > 255)
    return true;
  for (const auto& c : t.children) {
    if (anyWideFanOut(c))
      return true;
  }
  return false;
}

} // namespace

std::string
toString(MessageKind k)
{
  switch (k) {
  case MessageKind::ControlYpp:
    return "ctl-ypp";
  case MessageKind::DataYpp:
    return "data-ypp";
  case MessageKind::DataYsync:
    return "data-ysync";
  case MessageKind::AnycastDataYsync:
    return "any-ysync";
  case MessageKind::AnycastDataYpp:
    return "any-ypp";
  }
  return "unknown";
}

std::size_t
PathTree::nodeCount() const
{
  std::size_t n = 1;
  for (const auto& c : children)
    n += c.nodeCount();
  return n;
}

std::vector<Yni>
PathTree::nodes() const
{
  std::vector<Yni> out;
  collectNodes(*this, out);
  return out;
}

std::vector<std::pair<Yni, Yni>>
PathTree::edges() const
{
  std::vector<std::pair<Yni, Yni>> out;
  collectEdges(*this, out);
  return out;
}

std::vector<Yni>
PathTree::leaves() const
{
  std::vector<Yni> out;
  collectLeaves(*this, out);
  return out;
}

bool
PathTree::contains(const Yni& y) const
{
  if (yni == y)
    return true;
  for (const auto& c : children) {
    if (c.contains(y))
      return true;
  }
  return false;
}

bool
PathTree::isLoopFree() const
{
  auto all = nodes();
  std::set<Yni> seen(all.begin(), all.end());
  return seen.size() == all.size();
}

std::size_t
PathTree::serializedSize() const
{
  return nodeCount() * (Yni::WIDTH + 1);
}

void
PathTree::writeTo(ByteWriter& w) const
{
  yni.writeTo(w);
  w.u8(static_cast<std::uint8_t>(children.size()));
  for (const auto& c : children)
    c.writeTo(w);
}

PathTree
PathTree::readFrom(ByteReader& r)
{
  PathTree t;
  t.yni = Yni::fromBytes(r.raw(Yni::WIDTH));
  std::uint8_t count = r.u8();
  t.children.reserve(count);
  for (std::uint8_t i = 0; i < count; ++i)
    t.children.push_back(readFrom(r));
  return t;
}

std::size_t
FloatingHeader::elementCount() const
{
  return (valleyId ? 1 : 0) + (channelId ? 1 : 0) + (namespaceId ? 1 : 0) +
         (applicationId ? 1 : 0) + (metadata ? 1 : 0) + (pathTree ? 1 : 0);
}

std::size_t
FloatingHeader::serializedSize() const
{
  std::size_t n = 0;
  if (valleyId)
    n += TLV_OVERHEAD + 4;
  if (channelId)
    n += TLV_OVERHEAD + 8;
  if (namespaceId)
    n += TLV_OVERHEAD + 4;
  if (applicationId)
    n += TLV_OVERHEAD + 4;
  if (metadata)
    n += TLV_OVERHEAD + metadata->size();
  if (pathTree)
    n += TLV_OVERHEAD + pathTree->serializedSize();
  return n;
}

YodelMessage&
YodelMessage::finalize()
{
  fixed.floatingLen = static_cast<std::uint16_t>(floating.serializedSize());
  fixed.payloadLen = static_cast<std::uint32_t>(data.size());
  return *this;
}

void
checkInvariants(const YodelMessage& msg)
{
  const auto& f = msg.floating;
  auto kind = msg.fixed.kind;

  if (isDataKind(kind) && (f.namespaceId || f.applicationId))
    throw CodecError(Code::InvariantViolation,
                     "namespace and application IDs are only allowed on control messages");
  if (isYsync(kind) && !f.pathTree)
    throw CodecError(Code::InvariantViolation, "YSync messages must carry a path tree");
  if (!isYsync(kind) && f.pathTree)
    throw CodecError(Code::InvariantViolation, "path tree is only allowed on YSync messages");
  if (f.pathTree) {
    if (anyWideFanOut(*f.pathTree))
      throw CodecError(Code::InvariantViolation, "path tree node has more than 255 children");
    if (!f.pathTree->isLoopFree())
      throw CodecError(Code::InvariantViolation, "path tree repeats a YNI");
    if (f.pathTree->serializedSize() > MAX_TLV_VALUE)
      throw CodecError(Code::InvariantViolation, "path tree too large");
  }
  if (f.metadata && f.metadata->size() > MAX_TLV_VALUE)
    throw CodecError(Code::InvariantViolation, "metadata too large");
  if (f.serializedSize() > 0xffff)
    throw CodecError(Code::InvariantViolation, "floating header too large");
  if (msg.data.size() > 0xffffffffULL)
    throw CodecError(Code::InvariantViolation, "payload too large");
}

Bytes
encode(const YodelMessage& msg)
{
  checkInvariants(msg);
  const auto& f = msg.floating;

  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(msg.fixed.kind));
  msg.fixed.sender.writeTo(w);
  msg.fixed.receiver.writeTo(w);
  w.u16(static_cast<std::uint16_t>(f.serializedSize()));
  w.u32(static_cast<std::uint32_t>(msg.data.size()));

  auto tlvHeader = [&w] (TlvTag tag, std::size_t len) {
    w.u8(static_cast<std::uint8_t>(tag));
    w.u16(static_cast<std::uint16_t>(len));
  };
  if (f.valleyId) {
    tlvHeader(TlvTag::ValleyId, 4);
    w.u32(*f.valleyId);
  }
  if (f.channelId) {
    tlvHeader(TlvTag::ChannelId, 8);
    w.u64(*f.channelId);
  }
  if (f.namespaceId) {
    tlvHeader(TlvTag::NamespaceId, 4);
    w.u32(*f.namespaceId);
  }
  if (f.applicationId) {
    tlvHeader(TlvTag::ApplicationId, 4);
    w.u32(*f.applicationId);
  }
  if (f.metadata) {
    tlvHeader(TlvTag::Metadata, f.metadata->size());
    w.raw(*f.metadata);
  }
  if (f.pathTree) {
    tlvHeader(TlvTag::PathTree, f.pathTree->serializedSize());
    f.pathTree->writeTo(w);
  }
  w.raw(msg.data);
  return w.take();
}

static void
decodeFloating(ByteSpan region, FloatingHeader& f)
{
  ByteReader r(region);
  std::set<std::uint8_t> seen;
  while (r.remaining() > 0) {
    if (r.remaining() < TLV_OVERHEAD)
      throw CodecError(Code::TruncatedMessage, "truncated TLV header");
    std::uint8_t tag = r.u8();
    std::uint16_t len = r.u16();
    if (tag < 0x01 || tag > 0x06)
      throw CodecError(Code::UnknownTag, "unknown floating-header tag " + std::to_string(tag));
    if (!seen.insert(tag).second)
      throw CodecError(Code::DuplicateTlv, "duplicate floating-header tag " + std::to_string(tag));
    if (len > r.remaining())
      throw CodecError(Code::TruncatedMessage, "TLV value runs past the floating header");
    ByteReader value(r.raw(len));

    auto expectLen = [len] (std::size_t want) {
      if (len != want)
        throw CodecError(Code::LengthMismatch, "TLV length does not match its element width");
    };
    switch (static_cast<TlvTag>(tag)) {
    case TlvTag::ValleyId:
      expectLen(4);
      f.valleyId = value.u32();
      break;
    case TlvTag::ChannelId:
      expectLen(8);
      f.channelId = value.u64();
      break;
    case TlvTag::NamespaceId:
      expectLen(4);
      f.namespaceId = value.u32();
      break;
    case TlvTag::ApplicationId:
      expectLen(4);
      f.applicationId = value.u32();
      break;
    case TlvTag::Metadata: {
      auto raw = value.raw(len);
      f.metadata = Bytes(raw.begin(), raw.end());
      break;
    }
    case TlvTag::PathTree:
      try {
        f.pathTree = PathTree::readFrom(value);
      }
      catch (const TruncatedInput&) {
        throw CodecError(Code::TruncatedMessage, "truncated path tree");
      }
      if (value.remaining() != 0)
        throw CodecError(Code::LengthMismatch, "path tree shorter than its TLV length");
      break;
    }
  }
}

YodelMessage
decode(ByteSpan bytes)
{
  if (bytes.empty())
    throw CodecError(Code::TruncatedMessage, "empty message");
  std::uint8_t kindByte = bytes[0];
  if (kindByte < 0x01 || kindByte > 0x05)
    throw CodecError(Code::UnknownKind, "unknown message kind " + std::to_string(kindByte));
  if (bytes.size() < FixedHeader::WIDTH)
    throw CodecError(Code::TruncatedMessage, "message shorter than the fixed header");

  YodelMessage msg;
  ByteReader r(bytes);
  msg.fixed.kind = static_cast<MessageKind>(r.u8());
  msg.fixed.sender = Yni::fromBytes(r.raw(Yni::WIDTH));
  msg.fixed.receiver = Yni::fromBytes(r.raw(Yni::WIDTH));
  msg.fixed.floatingLen = r.u16();
  msg.fixed.payloadLen = r.u32();

  std::size_t need = std::size_t(msg.fixed.floatingLen) + msg.fixed.payloadLen;
  if (need > r.remaining())
    throw CodecError(Code::TruncatedMessage, "declared lengths exceed the message size");
  if (need < r.remaining())
    throw CodecError(Code::LengthMismatch, "trailing bytes after payload");

  decodeFloating(r.raw(msg.fixed.floatingLen), msg.floating);
  auto payload = r.raw(msg.fixed.payloadLen);
  msg.data.assign(payload.begin(), payload.end());

  checkInvariants(msg);
  return msg;
}

std::vector<std::pair<Yni, YodelMessage>>
popPathRoot(const YodelMessage& msg, const Yni& self)
{
  if (!msg.floating.pathTree)
    throw CodecError(Code::InvariantViolation, "message carries no path tree");
  const auto& tree = *msg.floating.pathTree;
  if (tree.yni != self)
    throw CodecError(Code::RootMismatch,
                     "path tree rooted at " + tree.yni.toString() + " popped at " + self.toString());

  std::vector<std::pair<Yni, YodelMessage>> out;
  out.reserve(tree.children.size());
  for (const auto& child : tree.children) {
    YodelMessage fwd;
    fwd.fixed.kind = msg.fixed.kind;
    fwd.fixed.sender = self;
    fwd.fixed.receiver = child.yni;
    fwd.floating = msg.floating;
    fwd.floating.pathTree = child;
    fwd.data = msg.data;
    fwd.finalize();
    out.emplace_back(child.yni, std::move(fwd));
  }
  return out;
}

} // namespace yodel

#include "yodel/control-message.hpp"

namespace yodel {

std::string
toString(ControlOp op)
{
  switch (op) {
  case ControlOp::JoinRequest:
    return "join-req";
  case ControlOp::JoinAck:
    return "join-ack";
  case ControlOp::Leave:
    return "leave";
  case ControlOp::ProducerLock:
    return "producer-lock";
  case ControlOp::ChannelUpdate:
    return "channel-update";
  case ControlOp::ConsumerLock:
    return "consumer-lock";
  case ControlOp::Reconnect:
    return "reconnect";
  case ControlOp::ConnectAck:
    return "connect-ack";
  case ControlOp::TwinQuery:
    return "twin-query";
  case ControlOp::TwinResponse:
    return "twin-resp";
  case ControlOp::ControllerJoin:
    return "ctl-join";
  case ControlOp::ControllerJoinReply:
    return "ctl-join-reply";
  case ControlOp::RemoveRole:
    return "remove-role";
  case ControlOp::PathAdvertise:
    return "path-adv";
  case ControlOp::PathWithdraw:
    return "path-withdraw";
  case ControlOp::EdgeLock:
    return "edge-lock";
  case ControlOp::NeighborReport:
    return "neighbor-report";
  }
  return "unknown";
}

std::string
toString(Role role)
{
  switch (role) {
  case Role::Producer:
    return "producer";
  case Role::Consumer:
    return "consumer";
  case Role::Member:
    return "member";
  }
  return "unknown";
}

Bytes
ControlBody::encode() const
{
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(op));
  w.u8(static_cast<std::uint8_t>(role));
  w.u8(flags);
  w.u8(static_cast<std::uint8_t>(model));
  w.u64(a);
  w.u64(b);
  w.u16(static_cast<std::uint16_t>(text.size()));
  w.str(text);
  w.u16(static_cast<std::uint16_t>(neighbors.size()));
  for (const auto& n : neighbors) {
    n.yni.writeTo(w);
    w.u32(n.latency);
  }
  w.u8(tree ? 1 : 0);
  if (tree)
    tree->writeTo(w);
  return w.take();
}

ControlBody
ControlBody::decode(ByteSpan bytes)
{
  using Code = CodecError::Code;
  try {
    ByteReader r(bytes);
    ControlBody body;
    std::uint8_t op = r.u8();
    if (!((op >= 0x01 && op <= 0x0a) || (op >= 0x20 && op <= 0x26)))
      throw CodecError(Code::InvariantViolation, "bad op in control body");
    body.op = static_cast<ControlOp>(op);
    std::uint8_t role = r.u8();
    if (role < 1 || role > 3)
      throw CodecError(Code::InvariantViolation, "bad role in control body");
    body.role = static_cast<Role>(role);
    body.flags = r.u8();
    std::uint8_t model = r.u8();
    if (model < 1 || model > 7)
      throw CodecError(Code::InvariantViolation, "bad service model in control body");
    body.model = static_cast<ServiceModel>(model);
    body.a = r.u64();
    body.b = r.u64();
    body.text = r.str(r.u16());
    std::uint16_t count = r.u16();
    body.neighbors.reserve(count);
    for (std::uint16_t i = 0; i < count; ++i) {
      NeighborEntry n;
      n.yni = Yni::fromBytes(r.raw(Yni::WIDTH));
      n.latency = r.u32();
      body.neighbors.push_back(n);
    }
    std::uint8_t hasTree = r.u8();
    if (hasTree > 1)
      throw CodecError(Code::InvariantViolation, "bad tree marker in control body");
    if (hasTree == 1) {
      body.tree = PathTree::readFrom(r);
      if (!body.tree->isLoopFree())
        throw CodecError(Code::InvariantViolation, "path tree repeats a YNI");
    }
    if (r.remaining() != 0)
      throw CodecError(Code::LengthMismatch, "trailing bytes after control body");
    return body;
  }
  catch (const TruncatedInput&) {
    throw CodecError(Code::TruncatedMessage, "truncated control body");
  }
}

YodelMessage
makeControl(const Yni& sender, const Yni& receiver, FloatingHeader floating, const ControlBody& body)
{
  YodelMessage msg;
  msg.fixed.kind = MessageKind::ControlYpp;
  msg.fixed.sender = sender;
  msg.fixed.receiver = receiver;
  msg.floating = std::move(floating);
  msg.data = body.encode();
  msg.finalize();
  return msg;
}

} // namespace yodel

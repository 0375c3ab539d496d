#ifndef YODEL_CONTROL_MESSAGE_HPP
#define YODEL_CONTROL_MESSAGE_HPP

#include "yodel/codec.hpp"
#include "yodel/service-model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace yodel {

/// Operation carried in the data part of a control YPP.
enum class ControlOp : std::uint8_t {
  // host <-> edge
  JoinRequest = 0x01,
  JoinAck = 0x02,
  Leave = 0x03,
  ProducerLock = 0x04,
  ChannelUpdate = 0x05,
  ConsumerLock = 0x06,
  Reconnect = 0x07,
  ConnectAck = 0x08,
  TwinQuery = 0x09,
  TwinResponse = 0x0a,
  // edge <-> controller
  ControllerJoin = 0x20,
  ControllerJoinReply = 0x21,
  RemoveRole = 0x22,
  PathAdvertise = 0x23,
  PathWithdraw = 0x24,
  EdgeLock = 0x25,
  NeighborReport = 0x26,
};

std::string
toString(ControlOp op);

enum class Role : std::uint8_t {
  Producer = 1,
  Consumer = 2,
  /// Combined producer and consumer role of many-to-many communities.
  Member = 3,
};

std::string
toString(Role role);

namespace control_flag {
inline constexpr std::uint8_t LOCK = 0x01;
inline constexpr std::uint8_t FRESH = 0x02;
inline constexpr std::uint8_t DENIED = 0x04;
inline constexpr std::uint8_t RANDOMIZED = 0x08;
} // namespace control_flag

struct NeighborEntry
{
  Yni yni;
  std::uint32_t latency = 0;

  friend bool operator==(const NeighborEntry&, const NeighborEntry&) = default;
};

/**
 * \brief Body of a control message.
 *
 * Layout: op, role, flags, service model (1 byte each), two 8-byte
 * arguments, a length-prefixed text field, a neighbor list and an optional
 * path tree (presence byte, then the preorder encoding). The meaning
 * of the arguments depends on the op (e.g. ChannelUpdate carries the old
 * and new channel IDs).
 */
struct ControlBody
{
  ControlOp op = ControlOp::JoinRequest;
  Role role = Role::Producer;
  std::uint8_t flags = 0;
  ServiceModel model = ServiceModel::MSM;
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  std::string text;
  std::vector<NeighborEntry> neighbors;
  std::optional<PathTree> tree;

  bool
  hasFlag(std::uint8_t f) const
  {
    return (flags & f) != 0;
  }

  Bytes
  encode() const;

  /// Throws CodecError on malformed input.
  static ControlBody
  decode(ByteSpan bytes);

  friend bool operator==(const ControlBody&, const ControlBody&) = default;
};

YodelMessage
makeControl(const Yni& sender, const Yni& receiver, FloatingHeader floating, const ControlBody& body);

} // namespace yodel

#endif // YODEL_CONTROL_MESSAGE_HPP

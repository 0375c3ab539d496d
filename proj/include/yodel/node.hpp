#ifndef YODEL_NODE_HPP
#define YODEL_NODE_HPP

#include "yodel/codec.hpp"
#include "yodel/node-context.hpp"
#include "yodel/rng.hpp"
#include "yodel/strategy.hpp"

#include <map>
#include <string>
#include <vector>

namespace yodel {

enum class NodeKind {
  Host,
  Edge,
  Connector,
};

std::string
toString(NodeKind kind);

/**
 * \brief Common part of hosts, edges and connectors.
 *
 * A node owns its ACT and its random stream, decodes what arrives on its
 * links and sends through its ACT strategies.
 */
class Node
{
public:
  Node(const Yni& yni, std::string name, NodeContext& ctx, Rng rng);

  virtual
  ~Node() = default;

  virtual NodeKind
  kind() const = 0;

  const Yni&
  yni() const
  {
    return m_yni;
  }

  const std::string&
  name() const
  {
    return m_name;
  }

  AcTable&
  act()
  {
    return m_act;
  }

  const AcTable&
  act() const
  {
    return m_act;
  }

  bool
  alive() const
  {
    return m_alive;
  }

  void
  crash()
  {
    m_alive = false;
  }

  /// Records an edge or connector neighbor reachable over a link.
  void
  addInfraNeighbor(const Yni& neighbor, Tick latency);

  /// Decodes and dispatches bytes received from @p from.
  void
  receive(const Yni& from, ByteSpan bytes);

  /// Link to @p neighbor went down or came back.
  virtual void
  linkChanged(const Yni& neighbor, bool up);

protected:
  virtual void
  handle(const YodelMessage& msg) = 0;

  /// Single-hop send to a neighbor. Returns false (and traces a drop) if no
  /// available strategy reaches it.
  bool
  sendTo(const Yni& neighbor, YodelMessage msg);

  /// Strategic forwarding of per-child messages, one per distinct receiver.
  void
  forward(std::vector<YodelMessage> messages);

  /// Tells the controller the current set of reachable infrastructure
  /// neighbors.
  void
  reportNeighbors();

  void
  emit(const std::string& event, std::vector<std::pair<std::string, std::string>> fields = {});

protected:
  Yni m_yni;
  std::string m_name;
  NodeContext& m_ctx;
  Rng m_rng;
  AcTable m_act;
  bool m_alive = true;
  /// infrastructure neighbor -> (latency, link up)
  std::map<Yni, std::pair<Tick, bool>> m_infra;
};

/// Trace fields describing a message (kind, op or channel, message id).
std::vector<std::pair<std::string, std::string>>
describeMessage(const YodelMessage& msg);

/// Message ID carried at the front of a data payload, empty if none.
std::string
payloadMessageId(ByteSpan data);

/**
 * \brief Stateless transit node.
 *
 * Keeps nothing but its ACT; forwards YSync messages by popping the path
 * tree root.
 */
class Connector : public Node
{
public:
  using Node::Node;

  NodeKind
  kind() const override
  {
    return NodeKind::Connector;
  }

protected:
  void
  handle(const YodelMessage& msg) override;
};

} // namespace yodel

#endif // YODEL_NODE_HPP

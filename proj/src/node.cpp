#include "yodel/node.hpp"

#include "yodel/control-message.hpp"
#include "yodel/services.hpp"

#include <algorithm>

namespace yodel {

std::string
toString(NodeKind kind)
{
  switch (kind) {
  case NodeKind::Host:
    return "host";
  case NodeKind::Edge:
    return "edge";
  case NodeKind::Connector:
    return "connector";
  }
  return "unknown";
}

Node::Node(const Yni& yni, std::string name, NodeContext& ctx, Rng rng)
  : m_yni(yni)
  , m_name(std::move(name))
  , m_ctx(ctx)
  , m_rng(std::move(rng))
{
}

void
Node::addInfraNeighbor(const Yni& neighbor, Tick latency)
{
  m_infra[neighbor] = {latency, true};
  m_act.addNeighbor(neighbor, latency);
}

void
Node::receive(const Yni& from, ByteSpan bytes)
{
  if (!m_alive)
    return;
  YodelMessage msg;
  try {
    msg = decode(bytes);
  }
  catch (const CodecError& e) {
    emit("ERROR", {{"from", from.toString()}, {"reason", e.what()}});
    return;
  }
  handle(msg);
}

void
Node::linkChanged(const Yni& neighbor, bool up)
{
  m_act.setNeighborReachable(neighbor, up);
  auto it = m_infra.find(neighbor);
  if (it == m_infra.end())
    return;
  it->second.second = up;
  reportNeighbors();
}

bool
Node::sendTo(const Yni& neighbor, YodelMessage msg)
{
  if (!m_act.isReachable(neighbor)) {
    auto fields = describeMessage(msg);
    fields.insert(fields.begin(), {"to", neighbor.toString()});
    fields.push_back({"reason", "no-strategy"});
    emit("DROP", std::move(fields));
    m_ctx.metrics().drops[m_yni]++;
    return false;
  }
  auto plan = selectStrategies({neighbor}, m_act);
  msg.fixed.sender = m_yni;
  msg.fixed.receiver = neighbor;
  std::vector<YodelMessage> batch;
  batch.push_back(std::move(msg));
  m_ctx.transmit(m_yni, m_act.strategies()[plan.front().strategy], std::move(batch));
  return true;
}

void
Node::forward(std::vector<YodelMessage> messages)
{
  std::map<Yni, YodelMessage> byChild;
  std::set<Yni> required;
  for (auto& m : messages) {
    const Yni child = m.fixed.receiver;
    if (!m_act.isReachable(child)) {
      auto fields = describeMessage(m);
      fields.insert(fields.begin(), {"to", child.toString()});
      fields.push_back({"reason", "no-strategy"});
      emit("DROP", std::move(fields));
      m_ctx.metrics().drops[m_yni]++;
      continue;
    }
    required.insert(child);
    byChild.emplace(child, std::move(m));
  }
  if (required.empty())
    return;

  auto plan = selectStrategies(required, m_act);
  for (const auto& step : plan) {
    std::vector<YodelMessage> batch;
    for (const auto& child : step.covered)
      batch.push_back(std::move(byChild.at(child)));
    m_ctx.transmit(m_yni, m_act.strategies()[step.strategy], std::move(batch));
  }
}

void
Node::reportNeighbors()
{
  ControlBody body;
  body.op = ControlOp::NeighborReport;
  for (const auto& [n, state] : m_infra) {
    if (state.second)
      body.neighbors.push_back({n, static_cast<std::uint32_t>(state.first)});
  }
  m_ctx.toController(makeControl(m_yni, Yni(), {}, body));
}

void
Node::emit(const std::string& event, std::vector<std::pair<std::string, std::string>> fields)
{
  m_ctx.trace({m_ctx.now(), event, m_yni.toString(), std::move(fields)});
}

std::string
payloadMessageId(ByteSpan data)
{
  std::string id;
  for (auto b : data) {
    if (b == '|' || b == ':')
      break;
    id.push_back(static_cast<char>(b));
  }
  return id;
}

std::vector<std::pair<std::string, std::string>>
describeMessage(const YodelMessage& msg)
{
  std::vector<std::pair<std::string, std::string>> fields;
  fields.push_back({"kind", std::string(toString(msg.fixed.kind))});
  if (msg.fixed.kind == MessageKind::ControlYpp) {
    try {
      fields.push_back({"op", toString(ControlBody::decode(msg.data).op)});
    }
    catch (const CodecError&) {
      fields.push_back({"op", "?"});
    }
    return fields;
  }
  if (msg.floating.channelId)
    fields.push_back({"ch", std::to_string(*msg.floating.channelId)});
  fields.push_back({"msg", payloadMessageId(msg.data)});
  return fields;
}

void
Connector::handle(const YodelMessage& msg)
{
  if (!isYsync(msg.fixed.kind)) {
    emit("ERROR", {{"from", msg.fixed.sender.toString()},
                   {"reason", "connector got " + std::string(toString(msg.fixed.kind))}});
    return;
  }
  std::vector<YodelMessage> children;
  try {
    for (auto& [next, fwd] : popPathRoot(msg, m_yni))
      children.push_back(std::move(fwd));
  }
  catch (const CodecError&) {
    emit("ROOT_MISMATCH", {{"from", msg.fixed.sender.toString()}, {"msg", payloadMessageId(msg.data)}});
    return;
  }

  if (isAnycastKind(msg.fixed.kind) && !children.empty()) {
    auto keep = anycastFilter(AnycastStage::Connector, std::vector<bool>(children.size(), false),
                              AnycastMode::randomized(m_ctx.config().pDeliver), m_rng);
    std::vector<YodelMessage> kept;
    for (auto i : keep)
      kept.push_back(std::move(children[i]));
    children = std::move(kept);
  }
  forward(std::move(children));
}

} // namespace yodel

#include "yodel/flow.hpp"

namespace yodel {

std::string
Flow::label() const
{
  return std::to_string(valley) + "/" + namespaceName + "/" + community;
}

std::set<Yni>
Flow::activeProducerEdges() const
{
  std::set<Yni> out;
  for (const auto& [edge, active] : producerEdges) {
    if (active)
      out.insert(edge);
  }
  return out;
}

std::vector<ChannelId>
Flow::channelIds() const
{
  if (!isPartitioned())
    return {flowChannel};
  std::vector<ChannelId> out;
  for (const auto& p : partitions)
    out.push_back(p.channel);
  return out;
}

ChannelId
Flow::producerChannel(const Yni& edge) const
{
  for (const auto& p : partitions) {
    if (p.producerEdge == edge)
      return p.channel;
  }
  return flowChannel;
}

ChannelId
Flow::consumerChannel(const Yni& edge) const
{
  for (const auto& p : partitions) {
    if (p.consumerEdges.count(edge) > 0)
      return p.channel;
  }
  return flowChannel;
}

} // namespace yodel

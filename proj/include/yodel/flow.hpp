#ifndef YODEL_FLOW_HPP
#define YODEL_FLOW_HPP

#include "yodel/codec.hpp"
#include "yodel/model.hpp"
#include "yodel/services.hpp"

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace yodel {

/// A forwarding tree rooted at one producer edge of a channel.
struct PathObject
{
  Yni source;
  PathTree tree;
  ChannelId channel = 0;
  ValleyNumber valley = 0;

  friend bool operator==(const PathObject&, const PathObject&) = default;
};

/// A channel of a flow, present while it has an active producer edge and a
/// consumer edge distinct from it.
struct ChannelObject
{
  ChannelId id = 0;
  std::set<Yni> producerEdges;
  std::set<Yni> consumerEdges;
  std::set<Yni> connectors;
  ChannelSourceType sourceType = ChannelSourceType::Single;
};

/**
 * \brief Controller routing state of one community.
 *
 * Producer and consumer edges form the two sides of a bipartite graph; an
 * edge that does both appears on both sides.
 */
struct Flow
{
  ValleyNumber valley = 0;
  NamespaceNumber ns = 0;
  std::string namespaceName;
  std::string community;
  ServiceModel model = ServiceModel::MSM;
  /// Allocated when the flow is created, whether or not a channel ever forms.
  ChannelId flowChannel = 0;

  /// producer edge -> active
  std::map<Yni, bool> producerEdges;
  std::set<Yni> consumerEdges;
  /// Non-empty iff the flow partitions.
  std::vector<Partition> partitions;

  /// (channel, source edge) -> advertised path
  std::map<std::pair<ChannelId, Yni>, PathObject> advertised;
  /// on-hold producer edge -> pre-computed path
  std::map<Yni, PathObject> precomputed;
  /// (channel, source edge) -> consumer edges the last computation missed
  std::map<std::pair<ChannelId, Yni>, std::set<Yni>> unreachable;

  bool
  isPartitioned() const
  {
    return !partitions.empty();
  }

  std::string
  label() const;

  std::set<Yni>
  activeProducerEdges() const;

  /// Channel IDs currently in use by the flow (one per partition, or one).
  std::vector<ChannelId>
  channelIds() const;

  /// Channel a producer edge sends on.
  ChannelId
  producerChannel(const Yni& edge) const;

  /// Channel a consumer edge receives on.
  ChannelId
  consumerChannel(const Yni& edge) const;

  /// Channels that currently have an active producer and a distinct
  /// consumer edge. Connector sets come from the advertised paths and
  /// @p isConnector.
  template<typename IsConnector>
  std::vector<ChannelObject>
  channels(IsConnector isConnector) const;
};

template<typename IsConnector>
std::vector<ChannelObject>
Flow::channels(IsConnector isConnector) const
{
  std::vector<ChannelObject> out;
  auto sourceType = attributesOf(model).channelType;
  auto build = [&] (ChannelId id, std::set<Yni> producers, std::set<Yni> consumers) {
    bool distinct = false;
    for (const auto& p : producers) {
      for (const auto& c : consumers) {
        if (c != p)
          distinct = true;
      }
    }
    if (!distinct)
      return;
    ChannelObject ch{id, std::move(producers), std::move(consumers), {}, sourceType};
    for (const auto& [key, path] : advertised) {
      if (key.first != id)
        continue;
      for (const auto& n : path.tree.nodes()) {
        if (isConnector(n))
          ch.connectors.insert(n);
      }
    }
    out.push_back(std::move(ch));
  };

  if (isPartitioned()) {
    for (const auto& p : partitions) {
      if (p.producerEdge)
        build(p.channel, {*p.producerEdge}, p.consumerEdges);
    }
  }
  else {
    build(flowChannel, activeProducerEdges(), consumerEdges);
  }
  return out;
}

} // namespace yodel

#endif // YODEL_FLOW_HPP

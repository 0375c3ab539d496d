#ifndef YODEL_CONTROLLER_HPP
#define YODEL_CONTROLLER_HPP

#include "yodel/control-message.hpp"
#include "yodel/flow.hpp"
#include "yodel/model.hpp"
#include "yodel/node-context.hpp"
#include "yodel/topology.hpp"

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace yodel {

class ControllerError : public std::runtime_error
{
public:
  enum class Code {
    AuthFailed,
    NoEdgeAvailable,
    UnknownValley,
    UnknownNamespace,
    AccessDenied,
    UnknownMembership,
    UnregisteredEdge,
  };

  ControllerError(Code code, const std::string& what)
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

/// Host placement preferences.
struct HostIntent
{
  std::optional<std::string> preferredDomain;
  std::optional<Tick> maxLatency;
};

/// Outcome of the access lookup a host performs before joining.
struct AccessGrant
{
  ValleyNumber valley = 0;
  NamespaceNumber ns = 0;
  ServiceModel model = ServiceModel::MSM;
  AnycastMode anycast;
};

struct EdgeJoinResult
{
  ChannelId channel = 0;
  bool locked = false;
};

/**
 * \brief The logically centralized controller.
 *
 * The Connect half keeps users, the infrastructure topology and host
 * placement. The Master half keeps one VIB per valley and one Flow per
 * community, handles edge joins and role removals, and computes and
 * advertises forwarding paths. All output goes through the NodeContext.
 */
class Controller
{
public:
  Controller(const Yni& yni, NodeContext& ctx);

  const Yni&
  yni() const
  {
    return m_yni;
  }

  // Connect

  void
  registerUser(const UserId& user);

  bool
  hasUser(const UserId& user) const
  {
    return m_users.count(user) > 0;
  }

  /// Lexicographic minimum of (meets preferences ? 0 : 1, latency estimate,
  /// -(compute - attached hosts), YNI) over all edges.
  Yni
  provisionHost(const UserId& user, const HostIntent& intent) const;

  void
  noteHostAttached(const Yni& edge, int delta = 1);

  void
  registerInfrastructureNode(const Yni& yni, NodeRole role, const std::string& domain,
                             const std::vector<NeighborEntry>& neighbors,
                             const NodeStats& stats = {});

  const TopologyGraph&
  topology() const
  {
    return m_graph;
  }

  AccessGrant
  resolveAccess(const UserId& user, const std::string& valley, const std::string& ns) const;

  // Master

  ModelRegistry&
  registry()
  {
    return m_registry;
  }

  const ModelRegistry&
  registry() const
  {
    return m_registry;
  }

  /// Adds @p edge to the community's flow, replies to the edge, then sends
  /// any channel updates and path changes.
  EdgeJoinResult
  handleEdgeJoin(ValleyNumber valley, NamespaceNumber ns, const std::string& community,
                 const Yni& edge, Role role);

  void
  removeEdgeRole(ValleyNumber valley, NamespaceNumber ns, const std::string& community,
                 const Yni& edge, Role role);

  /// Re-runs partitioning on a partitioned flow.
  void
  repartition(ValleyNumber valley, NamespaceNumber ns, const std::string& community);

  /// Dispatches a control message from an edge or connector.
  void
  receive(const YodelMessage& msg);

  const Flow*
  findFlow(ValleyNumber valley, NamespaceNumber ns, const std::string& community) const;

  std::vector<const Flow*>
  flows() const;

  std::vector<ChannelObject>
  channelsOf(const Flow& flow) const;

  /// Tree from @p source to the consumers of @p channel in @p flow.
  /// Throws UnreachableConsumer if some consumer edge cannot be reached.
  PathObject
  computePath(const Flow& flow, ChannelId channel, const Yni& source) const;

private:
  using FlowKey = std::tuple<ValleyNumber, NamespaceNumber, std::string>;

  Flow&
  flowFor(ValleyNumber valley, NamespaceNumber ns, const std::string& community);

  Flow*
  findFlowMutable(ValleyNumber valley, NamespaceNumber ns, const std::string& community);

  bool
  addProducerEdge(Flow& flow, const Yni& edge);

  void
  addConsumerEdge(Flow& flow, const Yni& edge);

  void
  dropProducerEdge(Flow& flow, const Yni& edge);

  void
  dropConsumerEdge(Flow& flow, const Yni& edge);

  void
  applyPartitionPlan(Flow& flow, const PartitionPlan& plan);

  void
  sendChannelUpdate(const Flow& flow, const Yni& edge, Role role, ChannelId from, ChannelId to);

  void
  sendEdgeLock(const Flow& flow, const Yni& edge, bool lock);

  /// Targets of @p source on @p channel.
  std::set<Yni>
  pathTargets(const Flow& flow, ChannelId channel, const Yni& source) const;

  void
  recompute(Flow& flow);

  /// Sends queued channel updates, then path changes, then edge unlocks.
  void
  flushPending(Flow& flow);

  void
  recomputeAll();

  void
  emit(const std::string& event, std::vector<std::pair<std::string, std::string>> fields);

private:
  Yni m_yni;
  NodeContext& m_ctx;

  std::set<UserId> m_users;
  TopologyGraph m_graph;
  std::map<Yni, int> m_attachedHosts;

  ModelRegistry m_registry;
  std::map<FlowKey, Flow> m_flows;

  std::vector<std::tuple<Yni, Role, ChannelId, ChannelId>> m_pendingUpdates;
  std::vector<Yni> m_pendingUnlocks;
};

} // namespace yodel

#endif // YODEL_CONTROLLER_HPP

#ifndef YODEL_EDGE_HPP
#define YODEL_EDGE_HPP

#include "yodel/control-message.hpp"
#include "yodel/node.hpp"
#include "yodel/services.hpp"
#include "yodel/twin.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace yodel {

/// A host's presence in a PPT or PCT row.
struct HostEntry
{
  std::set<ApplicationId> apps;
  /// Consumer lock requested by the host (all its apps are locked).
  bool locked = false;
};

struct WaitingJoin
{
  Yni host;
  ApplicationId app = 0;
  Role role = Role::Consumer;
};

/// PPT or PCT row, keyed by (namespace, community) within a valley.
struct FibRow
{
  NamespaceNumber ns = 0;
  std::string community;
  ChannelId channel = 0;
  ServiceModel model = ServiceModel::MSM;
  /// Edge-level lock; producer rows only.
  bool lock = false;
  /// Waiting for the controller's reply.
  bool pending = true;
  /// Role the controller knows this edge by (member rows come in pairs).
  Role joinedAs = Role::Consumer;
  /// Host or AlpHorn YNI -> entry
  std::map<Yni, HostEntry> hosts;
  std::optional<ProducerKey> activeProducer;
  std::set<ProducerKey> onHold;
  std::vector<WaitingJoin> waiting;
};

using FibKey = std::pair<NamespaceNumber, std::string>;

/// One valley's forwarding state on an edge.
struct ValleyFib
{
  std::map<FibKey, FibRow> ppt;
  std::map<FibKey, FibRow> pct;
  /// channel -> path tree rooted at this edge
  std::map<ChannelId, PathTree> aft;

  FibRow*
  pptByChannel(ChannelId channel);

  FibRow*
  pctByChannel(ChannelId channel);
};

/**
 * \brief Edge node: entry point of hosts into the Yodel network.
 *
 * Keeps one FIB per valley, contacts the controller once per community and
 * role, delivers to local consumer hosts, sources and terminates YSync
 * traffic, and runs the twins of its hosts.
 */
class Edge : public Node
{
public:
  Edge(const Yni& yni, std::string name, NodeContext& ctx, Rng rng);

  NodeKind
  kind() const override
  {
    return NodeKind::Edge;
  }

  /// Connects a freshly provisioned host and creates its twin.
  void
  attachHost(const Yni& host, Tick latency);

  bool
  hasHost(const Yni& host) const
  {
    return m_hosts.count(host) > 0;
  }

  const std::map<ValleyNumber, ValleyFib>&
  fibs() const
  {
    return m_fibs;
  }

  const ValleyFib*
  fib(ValleyNumber valley) const;

  const TwinTable&
  twins() const
  {
    return m_twins;
  }

  /// Periodic twin sync: queries reachable hosts, counts misses, activates
  /// twins and expires HAT rows.
  void
  syncTick();

  /// A host crashed; its registrations and twin go away at once.
  void
  hostCrashed(const Yni& host);

protected:
  void
  handle(const YodelMessage& msg) override;

private:
  enum class Table {
    Ppt,
    Pct,
  };

  std::map<FibKey, FibRow>&
  table(ValleyFib& fib, Table t)
  {
    return t == Table::Ppt ? fib.ppt : fib.pct;
  }

  static std::vector<Table>
  tablesFor(Role role);

  void
  onJoinRequest(const YodelMessage& msg, const ControlBody& body);

  void
  onControllerReply(const YodelMessage& msg, const ControlBody& body);

  void
  onLeave(const YodelMessage& msg, const ControlBody& body);

  void
  onHostData(const YodelMessage& msg);

  void
  onNetworkData(const YodelMessage& msg);

  void
  onPathAdvertise(const YodelMessage& msg, const ControlBody& body);

  void
  onPathWithdraw(const YodelMessage& msg, const ControlBody& body);

  void
  onEdgeLock(const YodelMessage& msg, const ControlBody& body);

  void
  onChannelUpdate(const YodelMessage& msg, const ControlBody& body);

  void
  onConsumerLock(const YodelMessage& msg, const ControlBody& body);

  void
  onTwinResponse(const YodelMessage& msg, const ControlBody& body);

  void
  onReconnect(const YodelMessage& msg);

  /// Adds a join to existing rows and answers the host.
  void
  admit(ValleyNumber valley, const FibKey& key, const WaitingJoin& join);

  void
  replyJoin(ValleyNumber valley, const FibKey& key, const WaitingJoin& join, ChannelId channel,
            ServiceModel model, bool locked, bool denied);

  /// Unlocks the next on-hold producer of an unlocked row with no active one.
  void
  failoverLocal(ValleyNumber valley, FibRow& row);

  void
  sendProducerLock(ValleyNumber valley, const FibRow& row, const ProducerKey& producer, bool lock);

  /// Drops empty rows and tells the controller.
  void
  retireIfEmpty(ValleyNumber valley, const FibKey& key, Table t);

  /// Removes @p entryKey (host or AlpHorn of @p host) from one row.
  void
  removeHostFromRow(ValleyNumber valley, const FibKey& key, Table t, const Yni& entryKey,
                    const Yni& host);

  /// Removes every registration of @p host on this edge.
  void
  purgeHost(const Yni& host);

  void
  deliverLocal(ValleyNumber valley, const YodelMessage& msg, const std::optional<Yni>& exclude);

  /// Sends to a host, or buffers in its twin when @p target is an AlpHorn.
  void
  sendToHost(const Yni& target, YodelMessage msg);

  void
  sourceYsync(ValleyNumber valley, ChannelId channel, const YodelMessage& msg);

  void
  activateTwin(const Yni& host);

  void
  expireTwin(const Yni& host);

  void
  swapPct(const Yni& from, const Yni& to, const Yni& host, const char* direction);

  void
  sendConnectAck(const Yni& host, const Yni& alphorn, bool fresh);

private:
  std::map<ValleyNumber, ValleyFib> m_fibs;
  std::set<Yni> m_hosts;
  TwinTable m_twins;
  /// host -> valleys where it has consumer rows (twin swap index)
  std::map<Yni, std::set<ValleyNumber>> m_consumerValleys;
};

} // namespace yodel

#endif // YODEL_EDGE_HPP

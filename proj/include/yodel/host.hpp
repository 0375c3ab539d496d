#ifndef YODEL_HOST_HPP
#define YODEL_HOST_HPP

#include "yodel/control-message.hpp"
#include "yodel/controller.hpp"
#include "yodel/node.hpp"
#include "yodel/registration.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>

namespace yodel {

/// What a host remembers about one (application, community, role) binding.
struct Membership
{
  ValleyNumber valley = 0;
  NamespaceNumber ns = 0;
  std::string community;
  Role role = Role::Consumer;
  ChannelId channel = 0;
  ServiceModel model = ServiceModel::MSM;
  AnycastMode anycast;
};

/**
 * \brief An end host and its Yodel daemon (YCD).
 *
 * Applications are identified by name in the scenario and by a host-local
 * numeric ID on the wire. The host keeps its PRT and CRT, delivers between
 * co-located applications itself and talks to exactly one edge.
 */
class Host : public Node
{
public:
  Host(const Yni& yni, std::string name, UserId user, NodeContext& ctx, Rng rng);

  NodeKind
  kind() const override
  {
    return NodeKind::Host;
  }

  const UserId&
  user() const
  {
    return m_user;
  }

  void
  attach(const Yni& edge, Tick latency);

  const std::optional<Yni>&
  edge() const
  {
    return m_edge;
  }

  const std::optional<Yni>&
  alphorn() const
  {
    return m_alphorn;
  }

  bool
  connected() const
  {
    return m_edge && m_act.isReachable(*m_edge);
  }

  /// Registers @p app in a community. Many-to-many communities always use
  /// the member role.
  void
  join(const std::string& app, const AccessGrant& grant, const std::string& community, Role role,
       std::optional<Tick> ttl = std::nullopt);

  void
  leave(const std::string& app, ValleyNumber valley, NamespaceNumber ns,
        const std::string& community, Role role);

  /// Publishes one data message; returns its message ID, or nullopt if
  /// nothing was sent.
  std::optional<std::string>
  send(const std::string& app, ValleyNumber valley, NamespaceNumber ns,
       const std::string& community, const std::string& payload = "");

  /// Consumer self-lock; only anycast communities allow it.
  bool
  setConsumerLock(const std::string& app, ValleyNumber valley, NamespaceNumber ns,
                  const std::string& community, bool lock);

  const RegistrationTable&
  prt() const
  {
    return m_tables.prt;
  }

  const RegistrationTable&
  crt() const
  {
    return m_tables.crt;
  }

  const RegistrationTables&
  tables() const
  {
    return m_tables;
  }

  std::optional<ApplicationId>
  appId(const std::string& app) const;

  const Membership*
  membership(const std::string& app, ValleyNumber valley, NamespaceNumber ns,
             const std::string& community, Role role) const;

  void
  linkChanged(const Yni& neighbor, bool up) override;

protected:
  void
  handle(const YodelMessage& msg) override;

private:
  using Key = std::tuple<ApplicationId, ValleyNumber, NamespaceNumber, std::string, Role>;

  struct PendingJoin
  {
    std::optional<Tick> ttl;
    AccessGrant grant;
  };

  ApplicationId
  ensureApp(const std::string& app);

  std::string
  appName(ApplicationId id) const;

  RegistrationTable&
  tableFor(Role role)
  {
    return role == Role::Producer ? m_tables.prt : m_tables.crt;
  }

  /// Treats every expired row as a leave.
  void
  expireRows();

  void
  dropMembership(const Key& key, bool notifyEdge);

  void
  syncConsumerLock(ValleyNumber valley, NamespaceNumber ns, const std::string& community,
                   ChannelId channel);

  void
  deliver(ApplicationId app, const YodelMessage& msg, const char* via);

  void
  onJoinAck(const YodelMessage& msg, const ControlBody& body);

  void
  onChannelUpdate(const YodelMessage& msg, const ControlBody& body);

  void
  sendControl(FloatingHeader fh, const ControlBody& body);

private:
  UserId m_user;
  std::optional<Yni> m_edge;
  std::map<std::string, ApplicationId> m_apps;
  RegistrationTables m_tables;
  /// key role is Producer or Consumer; a member binding has one of each
  std::map<Key, Membership> m_memberships;
  std::map<Key, PendingJoin> m_pending;
  /// (valley, channel) pairs this host asked its edge to lock
  std::set<std::pair<ValleyNumber, ChannelId>> m_edgeLocks;
  std::uint64_t m_sent = 0;
  bool m_greeted = false;
  /// twin identity announced by the edge
  std::optional<Yni> m_alphorn;
};

} // namespace yodel

#endif // YODEL_HOST_HPP

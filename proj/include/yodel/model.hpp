#ifndef YODEL_MODEL_HPP
#define YODEL_MODEL_HPP

#include "yodel/service-model.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

namespace yodel {

using ValleyNumber = std::uint32_t;
using NamespaceNumber = std::uint32_t;
using ChannelId = std::uint64_t;
using ApplicationId = std::uint32_t;

/// Opaque credential handle naming a user.
struct UserId
{
  std::string id;

  friend auto operator<=>(const UserId&, const UserId&) = default;
};

struct ValleyId
{
  ValleyNumber id = 0;
  std::string name;

  friend bool operator==(const ValleyId& a, const ValleyId& b) { return a.id == b.id; }
};

enum class Visibility : std::uint8_t {
  Open,
  Protected,
};

struct NamespaceRecord
{
  std::string name;
  NamespaceNumber id = 0;
  ValleyId valley;
  Visibility visibility = Visibility::Open;
  ServiceModel serviceModel = ServiceModel::MSM;
  AnycastMode anycast;
  UserId admin;
  std::set<UserId> authorizedUsers;
};

struct CommunityRecord
{
  std::string name;
  std::string namespaceName;
  /// Set once the controller has created the community's flow.
  std::optional<ChannelId> flowChannel;
};

/**
 * \brief The controller's per-valley knowledge base.
 *
 * Holds the valley's namespaces and communities and owns the valley's
 * channel-ID counter, so channel IDs are unique within the valley and never
 * reused.
 */
class ValleyInformationBase
{
public:
  explicit
  ValleyInformationBase(ValleyId valley)
    : m_valley(std::move(valley))
  {
  }

  const ValleyId&
  valley() const
  {
    return m_valley;
  }

  ChannelId
  allocateChannelId()
  {
    return m_nextChannelId++;
  }

  ChannelId
  peekNextChannelId() const
  {
    return m_nextChannelId;
  }

  NamespaceRecord*
  findNamespace(const std::string& name);

  const NamespaceRecord*
  findNamespace(const std::string& name) const;

  const NamespaceRecord*
  findNamespace(NamespaceNumber id) const;

  CommunityRecord*
  findCommunity(const std::string& ns, const std::string& name);

  const std::map<std::string, NamespaceRecord>&
  namespaces() const
  {
    return m_namespaces;
  }

  const std::map<std::pair<std::string, std::string>, CommunityRecord>&
  communities() const
  {
    return m_communities;
  }

private:
  friend class ModelRegistry;

  ValleyId m_valley;
  std::map<std::string, NamespaceRecord> m_namespaces;
  std::map<std::pair<std::string, std::string>, CommunityRecord> m_communities;
  NamespaceNumber m_nextNamespaceId = 1;
  ChannelId m_nextChannelId = 1;
};

/**
 * \brief Valleys, namespaces, communities and their users.
 *
 * Name uniqueness is enforced at three scopes: valley names globally,
 * namespace names per valley, community names per namespace.
 */
class ModelRegistry
{
public:
  class Error : public std::runtime_error
  {
  public:
    enum class Code {
      DuplicateName,
      AccessDenied,
      UnknownUser,
      UnknownValley,
      UnknownNamespace,
    };

    Error(Code code, const std::string& what)
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

  ValleyId
  createValley(const UserId& admin, const std::string& name);

  /// Adds @p user to the valley; only the valley admin may do this.
  void
  addMember(const UserId& admin, ValleyNumber valley, const UserId& user);

  bool
  isMember(ValleyNumber valley, const UserId& user) const;

  const NamespaceRecord&
  createNamespace(const UserId& user, ValleyNumber valley, const std::string& name,
                  Visibility visibility, ServiceModel model,
                  AnycastMode anycast = AnycastMode::dedicated());

  /// Open namespaces admit every valley member; protected ones admit the
  /// admin and explicitly authorized users.
  bool
  authorizeAccess(const UserId& user, ValleyNumber valley, const std::string& ns) const;

  void
  grantAccess(const UserId& admin, ValleyNumber valley, const std::string& ns, const UserId& user);

  const NamespaceRecord&
  setVisibility(const UserId& admin, ValleyNumber valley, const std::string& ns,
                Visibility visibility);

  CommunityRecord&
  ensureCommunity(ValleyNumber valley, const std::string& ns, const std::string& name);

  std::optional<ValleyId>
  findValley(const std::string& name) const;

  ValleyInformationBase&
  vib(ValleyNumber valley);

  const ValleyInformationBase&
  vib(ValleyNumber valley) const;

  const ValleyInformationBase*
  findVib(ValleyNumber valley) const;

  const UserId&
  valleyAdmin(ValleyNumber valley) const;

private:
  struct ValleyEntry
  {
    UserId admin;
    std::set<UserId> members;
    ValleyInformationBase vib;
  };

  ValleyEntry&
  entry(ValleyNumber valley);

  const ValleyEntry&
  entry(ValleyNumber valley) const;

  NamespaceRecord&
  namespaceOf(ValleyNumber valley, const std::string& ns);

private:
  std::map<ValleyNumber, ValleyEntry> m_valleys;
  std::map<std::string, ValleyNumber> m_valleyNames;
  ValleyNumber m_nextValley = 1;
};

} // namespace yodel

#endif // YODEL_MODEL_HPP

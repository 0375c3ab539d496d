#include "yodel/model.hpp"

namespace yodel {

using Code = ModelRegistry::Error::Code;

NamespaceRecord*
ValleyInformationBase::findNamespace(const std::string& name)
{
  auto it = m_namespaces.find(name);
  return it == m_namespaces.end() ? nullptr : &it->second;
}

const NamespaceRecord*
ValleyInformationBase::findNamespace(const std::string& name) const
{
  auto it = m_namespaces.find(name);
  return it == m_namespaces.end() ? nullptr : &it->second;
}

const NamespaceRecord*
ValleyInformationBase::findNamespace(NamespaceNumber id) const
{
  for (const auto& [name, rec] : m_namespaces) {
    if (rec.id == id)
      return &rec;
  }
  return nullptr;
}

CommunityRecord*
ValleyInformationBase::findCommunity(const std::string& ns, const std::string& name)
{
  auto it = m_communities.find({ns, name});
  return it == m_communities.end() ? nullptr : &it->second;
}

ValleyId
ModelRegistry::createValley(const UserId& admin, const std::string& name)
{
  if (m_valleyNames.count(name) > 0)
    throw Error(Code::DuplicateName, "valley '" + name + "' already exists");

  ValleyId id{m_nextValley++, name};
  ValleyEntry e{admin, {admin}, ValleyInformationBase(id)};
  m_valleys.emplace(id.id, std::move(e));
  m_valleyNames.emplace(name, id.id);
  return id;
}

ModelRegistry::ValleyEntry&
ModelRegistry::entry(ValleyNumber valley)
{
  auto it = m_valleys.find(valley);
  if (it == m_valleys.end())
    throw Error(Code::UnknownValley, "unknown valley " + std::to_string(valley));
  return it->second;
}

const ModelRegistry::ValleyEntry&
ModelRegistry::entry(ValleyNumber valley) const
{
  auto it = m_valleys.find(valley);
  if (it == m_valleys.end())
    throw Error(Code::UnknownValley, "unknown valley " + std::to_string(valley));
  return it->second;
}

void
ModelRegistry::addMember(const UserId& admin, ValleyNumber valley, const UserId& user)
{
  auto& e = entry(valley);
  if (e.admin != admin)
    throw Error(Code::AccessDenied, "only the valley admin may add members");
  e.members.insert(user);
}

bool
ModelRegistry::isMember(ValleyNumber valley, const UserId& user) const
{
  auto it = m_valleys.find(valley);
  return it != m_valleys.end() && it->second.members.count(user) > 0;
}

const NamespaceRecord&
ModelRegistry::createNamespace(const UserId& user, ValleyNumber valley, const std::string& name,
                               Visibility visibility, ServiceModel model, AnycastMode anycast)
{
  auto& e = entry(valley);
  if (e.members.count(user) == 0)
    throw Error(Code::AccessDenied, user.id + " is not a member of valley " + e.vib.valley().name);
  if (e.vib.m_namespaces.count(name) > 0)
    throw Error(Code::DuplicateName, "namespace '" + name + "' already exists in valley");

  NamespaceRecord rec;
  rec.name = name;
  rec.id = e.vib.m_nextNamespaceId++;
  rec.valley = e.vib.valley();
  rec.visibility = visibility;
  rec.serviceModel = model;
  rec.anycast = anycast;
  rec.admin = user;
  return e.vib.m_namespaces.emplace(name, std::move(rec)).first->second;
}

NamespaceRecord&
ModelRegistry::namespaceOf(ValleyNumber valley, const std::string& ns)
{
  auto* rec = entry(valley).vib.findNamespace(ns);
  if (rec == nullptr)
    throw Error(Code::UnknownNamespace, "unknown namespace '" + ns + "'");
  return *rec;
}

bool
ModelRegistry::authorizeAccess(const UserId& user, ValleyNumber valley, const std::string& ns) const
{
  const auto& e = entry(valley);
  const auto* rec = e.vib.findNamespace(ns);
  if (rec == nullptr)
    throw Error(Code::UnknownNamespace, "unknown namespace '" + ns + "'");
  if (e.members.count(user) == 0)
    throw Error(Code::UnknownUser, user.id + " is not a member of valley " + e.vib.valley().name);

  if (rec->visibility == Visibility::Open)
    return true;
  return rec->admin == user || rec->authorizedUsers.count(user) > 0;
}

void
ModelRegistry::grantAccess(const UserId& admin, ValleyNumber valley, const std::string& ns,
                           const UserId& user)
{
  auto& rec = namespaceOf(valley, ns);
  if (rec.admin != admin)
    throw Error(Code::AccessDenied, "only the namespace admin may authorize users");
  if (!isMember(valley, user))
    throw Error(Code::UnknownUser, user.id + " is not a member of the valley");
  rec.authorizedUsers.insert(user);
}

const NamespaceRecord&
ModelRegistry::setVisibility(const UserId& admin, ValleyNumber valley, const std::string& ns,
                             Visibility visibility)
{
  auto& rec = namespaceOf(valley, ns);
  if (rec.admin != admin)
    throw Error(Code::AccessDenied, "only the namespace admin may change visibility");
  rec.visibility = visibility;
  return rec;
}

CommunityRecord&
ModelRegistry::ensureCommunity(ValleyNumber valley, const std::string& ns, const std::string& name)
{
  auto& e = entry(valley);
  if (e.vib.findNamespace(ns) == nullptr)
    throw Error(Code::UnknownNamespace, "unknown namespace '" + ns + "'");
  auto [it, inserted] = e.vib.m_communities.try_emplace({ns, name});
  if (inserted) {
    it->second.name = name;
    it->second.namespaceName = ns;
  }
  return it->second;
}

std::optional<ValleyId>
ModelRegistry::findValley(const std::string& name) const
{
  auto it = m_valleyNames.find(name);
  if (it == m_valleyNames.end())
    return std::nullopt;
  return m_valleys.at(it->second).vib.valley();
}

ValleyInformationBase&
ModelRegistry::vib(ValleyNumber valley)
{
  return entry(valley).vib;
}

const ValleyInformationBase&
ModelRegistry::vib(ValleyNumber valley) const
{
  return entry(valley).vib;
}

const ValleyInformationBase*
ModelRegistry::findVib(ValleyNumber valley) const
{
  auto it = m_valleys.find(valley);
  return it == m_valleys.end() ? nullptr : &it->second.vib;
}

const UserId&
ModelRegistry::valleyAdmin(ValleyNumber valley) const
{
  return entry(valley).admin;
}

} // namespace yodel

#include "yodel/host.hpp"

#include "yodel/services.hpp"

namespace yodel {

namespace {

std::vector<Role>
tableRoles(Role role)
{
  if (role == Role::Member)
    return {Role::Producer, Role::Consumer};
  return {role};
}

} // namespace

Host::Host(const Yni& yni, std::string name, UserId user, NodeContext& ctx, Rng rng)
  : Node(yni, std::move(name), ctx, std::move(rng))
  , m_user(std::move(user))
{
}

void
Host::attach(const Yni& edge, Tick latency)
{
  m_edge = edge;
  m_act.addNeighbor(edge, latency);
}

std::optional<ApplicationId>
Host::appId(const std::string& app) const
{
  auto it = m_apps.find(app);
  if (it == m_apps.end())
    return std::nullopt;
  return it->second;
}

ApplicationId
Host::ensureApp(const std::string& app)
{
  auto it = m_apps.find(app);
  if (it != m_apps.end())
    return it->second;
  ApplicationId id = static_cast<ApplicationId>(m_apps.size() + 1);
  m_apps.emplace(app, id);
  return id;
}

std::string
Host::appName(ApplicationId id) const
{
  for (const auto& [name, a] : m_apps) {
    if (a == id)
      return name;
  }
  return std::to_string(id);
}

const Membership*
Host::membership(const std::string& app, ValleyNumber valley, NamespaceNumber ns,
                 const std::string& community, Role role) const
{
  auto id = appId(app);
  if (!id)
    return nullptr;
  auto it = m_memberships.find({*id, valley, ns, community, role == Role::Member ? Role::Producer : role});
  return it == m_memberships.end() ? nullptr : &it->second;
}

void
Host::sendControl(FloatingHeader fh, const ControlBody& body)
{
  sendTo(*m_edge, makeControl(m_yni, *m_edge, std::move(fh), body));
}

void
Host::join(const std::string& app, const AccessGrant& grant, const std::string& community, Role role,
           std::optional<Tick> ttl)
{
  if (grant.model == ServiceModel::MMM)
    role = Role::Member;
  else if (role == Role::Member) {
    emit("JOIN_REFUSED", {{"app", app}, {"comm", community}, {"reason", "member-role-needs-mmm"}});
    return;
  }
  if (!connected()) {
    emit("JOIN_REFUSED", {{"app", app}, {"comm", community}, {"reason", "not-connected"}});
    return;
  }
  expireRows();

  ApplicationId id = ensureApp(app);
  Key key{id, grant.valley, grant.ns, community, role};
  Key probe{id, grant.valley, grant.ns, community, role == Role::Member ? Role::Producer : role};
  if (m_pending.count(key) > 0 || m_memberships.count(probe) > 0) {
    emit("JOIN_DUP", {{"app", app}, {"comm", community}, {"role", toString(role)}});
    return;
  }
  m_pending[key] = {ttl, grant};

  FloatingHeader fh;
  fh.valleyId = grant.valley;
  fh.namespaceId = grant.ns;
  fh.applicationId = id;
  ControlBody body;
  body.op = ControlOp::JoinRequest;
  body.role = role;
  body.model = grant.model;
  body.flags = grant.anycast.isRandomized() ? control_flag::RANDOMIZED : 0;
  body.text = community;
  sendControl(std::move(fh), body);
}

void
Host::onJoinAck(const YodelMessage& msg, const ControlBody& body)
{
  const auto& fh = msg.floating;
  if (!fh.valleyId || !fh.namespaceId || !fh.applicationId) {
    emit("ERROR", {{"reason", "join-ack without valley, namespace or application"}});
    return;
  }
  Key key{*fh.applicationId, *fh.valleyId, *fh.namespaceId, body.text, body.role};
  auto it = m_pending.find(key);
  if (it == m_pending.end())
    return;
  PendingJoin pending = it->second;
  m_pending.erase(it);
  std::string app = appName(*fh.applicationId);

  if (body.hasFlag(control_flag::DENIED)) {
    emit("JOIN_DENIED", {{"app", app}, {"comm", body.text}});
    return;
  }

  ChannelId channel = body.a;
  std::optional<Tick> expiry;
  if (pending.ttl)
    expiry = m_ctx.now() + *pending.ttl;
  bool locked = body.hasFlag(control_flag::LOCK);

  for (auto role : tableRoles(body.role)) {
    RegistrationRow row{*fh.applicationId, *fh.valleyId, channel, expiry,
                        role == Role::Producer && locked};
    tableFor(role).upsert(row);
    Membership m{*fh.valleyId, *fh.namespaceId, body.text, body.role, channel,
                 pending.grant.model, pending.grant.anycast};
    m_memberships[{*fh.applicationId, *fh.valleyId, *fh.namespaceId, body.text, role}] = m;
  }
  emit("JOINED", {{"app", app}, {"comm", body.text}, {"role", toString(body.role)},
                  {"ch", std::to_string(channel)}, {"lock", locked ? "1" : "0"}});
  if (body.role != Role::Producer)
    syncConsumerLock(*fh.valleyId, *fh.namespaceId, body.text, channel);
}

void
Host::leave(const std::string& app, ValleyNumber valley, NamespaceNumber ns,
            const std::string& community, Role role)
{
  auto id = appId(app);
  if (!id) {
    emit("LEAVE_UNKNOWN", {{"app", app}, {"comm", community}});
    return;
  }
  Key pendingKey{*id, valley, ns, community, role};
  for (const auto& [key, p] : m_pending) {
    if (std::get<0>(key) == *id && std::get<1>(key) == valley && std::get<2>(key) == ns &&
        std::get<3>(key) == community)
      pendingKey = key;
  }
  if (m_pending.erase(pendingKey) > 0) {
    // the edge drops it from its waiting list
    FloatingHeader fh;
    fh.valleyId = valley;
    fh.namespaceId = ns;
    fh.applicationId = *id;
    ControlBody body;
    body.op = ControlOp::Leave;
    body.role = std::get<4>(pendingKey);
    body.text = community;
    if (connected())
      sendControl(std::move(fh), body);
    return;
  }

  Key key{*id, valley, ns, community, role == Role::Consumer ? Role::Consumer : Role::Producer};
  auto it = m_memberships.find(key);
  if (it == m_memberships.end() && role != Role::Member) {
    // a member binding leaves as a whole, whichever side is named
    Key other{*id, valley, ns, community, role == Role::Consumer ? Role::Producer : Role::Consumer};
    auto alt = m_memberships.find(other);
    if (alt != m_memberships.end() && alt->second.role == Role::Member)
      it = alt;
  }
  if (it == m_memberships.end()) {
    emit("LEAVE_UNKNOWN", {{"app", app}, {"comm", community}});
    return;
  }
  dropMembership(it->first, true);
}

void
Host::dropMembership(const Key& key, bool notifyEdge)
{
  auto it = m_memberships.find(key);
  if (it == m_memberships.end())
    return;
  Membership m = it->second;
  auto [id, valley, ns, community, tableRole] = key;

  std::vector<Role> roles = m.role == Role::Member ? tableRoles(Role::Member) : std::vector<Role>{tableRole};
  for (auto r : roles) {
    tableFor(r).erase(id, valley, m.channel);
    m_memberships.erase({id, valley, ns, community, r});
  }
  emit("LEFT", {{"app", appName(id)}, {"comm", community}, {"role", toString(m.role)},
                {"ch", std::to_string(m.channel)}});

  if (notifyEdge && connected()) {
    FloatingHeader fh;
    fh.valleyId = valley;
    fh.channelId = m.channel;
    fh.namespaceId = ns;
    fh.applicationId = id;
    ControlBody body;
    body.op = ControlOp::Leave;
    body.role = m.role;
    body.model = m.model;
    body.a = m.channel;
    body.text = community;
    sendControl(std::move(fh), body);
  }
  if (m.role != Role::Producer)
    syncConsumerLock(valley, ns, community, m.channel);
}

void
Host::expireRows()
{
  Tick now = m_ctx.now();
  std::vector<Key> expired;
  for (const auto& [key, m] : m_memberships) {
    const auto* row = tableFor(std::get<4>(key)).find(std::get<0>(key), std::get<1>(key), m.channel);
    if (row && row->expiredAt(now))
      expired.push_back(key);
  }
  for (const auto& key : expired) {
    auto it = m_memberships.find(key);
    if (it == m_memberships.end())
      continue;
    emit("EXPIRE", {{"app", appName(std::get<0>(key))}, {"comm", std::get<3>(key)},
                    {"role", toString(it->second.role)}, {"ch", std::to_string(it->second.channel)}});
    dropMembership(key, true);
  }
}

std::optional<std::string>
Host::send(const std::string& app, ValleyNumber valley, NamespaceNumber ns,
           const std::string& community, const std::string& payload)
{
  expireRows();
  auto id = appId(app);
  const Membership* m = nullptr;
  if (id) {
    auto it = m_memberships.find({*id, valley, ns, community, Role::Producer});
    if (it != m_memberships.end())
      m = &it->second;
  }
  if (!m) {
    emit("DROP", {{"app", app}, {"comm", community}, {"reason", "no-registration"}});
    m_ctx.metrics().drops[m_yni]++;
    return std::nullopt;
  }
  const auto* row = m_tables.prt.find(*id, valley, m->channel);
  if (row->lock) {
    emit("DROP", {{"app", app}, {"ch", std::to_string(m->channel)}, {"reason", "locked"}});
    m_ctx.metrics().drops[m_yni]++;
    return std::nullopt;
  }

  std::string msgId = m_name + "." + app + "#" + std::to_string(++m_sent);
  std::string data = msgId + "|" + std::to_string(m_ctx.now());
  if (!payload.empty())
    data += ":" + payload;
  bool randomized = isAnycast(m->model) && m->anycast.isRandomized();

  YodelMessage msg;
  msg.fixed.kind = randomized ? MessageKind::AnycastDataYpp : MessageKind::DataYpp;
  msg.fixed.sender = m_yni;
  msg.floating.valleyId = valley;
  msg.floating.channelId = m->channel;
  msg.data.assign(data.begin(), data.end());
  msg.finalize();
  emit("PUBLISH", {{"app", app}, {"ch", std::to_string(m->channel)}, {"msg", msgId}});

  // in-host delivery
  std::vector<ApplicationId> candidates;
  std::vector<bool> locked;
  for (const auto& r : m_tables.crt.rows()) {
    if (r.valley != valley || r.channel != m->channel || r.expiredAt(m_ctx.now()))
      continue;
    if (m->model == ServiceModel::MMM && r.app == *id)
      continue;
    candidates.push_back(r.app);
    locked.push_back(r.lock);
  }
  if (!candidates.empty()) {
    auto mode = randomized ? AnycastMode::randomized(m_ctx.config().pDeliver) : AnycastMode::dedicated();
    for (auto i : anycastFilter(AnycastStage::Host, locked, mode, m_rng))
      deliver(candidates[i], msg, "host");
  }

  if (m_edge) {
    msg.fixed.receiver = *m_edge;
    sendTo(*m_edge, std::move(msg));
  }
  return msgId;
}

bool
Host::setConsumerLock(const std::string& app, ValleyNumber valley, NamespaceNumber ns,
                      const std::string& community, bool lock)
{
  expireRows();
  auto id = appId(app);
  const Membership* m = nullptr;
  if (id) {
    auto it = m_memberships.find({*id, valley, ns, community, Role::Consumer});
    if (it != m_memberships.end())
      m = &it->second;
  }
  if (!m) {
    emit("LOCK_REFUSED", {{"app", app}, {"comm", community}, {"reason", "no-registration"}});
    return false;
  }
  if (!consumerMayLock(m->model)) {
    emit("LOCK_REFUSED", {{"app", app}, {"comm", community}, {"reason", "service-forbids-self-lock"}});
    return false;
  }
  auto* row = m_tables.crt.find(*id, valley, m->channel);
  row->lock = lock;
  emit(lock ? "LOCK" : "UNLOCK", {{"app", app}, {"ch", std::to_string(m->channel)}, {"role", "consumer"}});
  syncConsumerLock(valley, ns, community, m->channel);
  return true;
}

void
Host::syncConsumerLock(ValleyNumber valley, NamespaceNumber ns, const std::string& community,
                       ChannelId channel)
{
  auto rows = m_tables.crt.matching(valley, channel);
  bool allLocked = !rows.empty();
  for (auto* r : rows)
    allLocked = allLocked && r->lock;
  bool wasLocked = m_edgeLocks.count({valley, channel}) > 0;
  if (rows.empty()) {
    m_edgeLocks.erase({valley, channel});
    return;
  }
  if (allLocked == wasLocked)
    return;
  if (allLocked)
    m_edgeLocks.insert({valley, channel});
  else
    m_edgeLocks.erase({valley, channel});
  if (!connected())
    return;
  FloatingHeader fh;
  fh.valleyId = valley;
  fh.channelId = channel;
  fh.namespaceId = ns;
  ControlBody body;
  body.op = ControlOp::ConsumerLock;
  body.role = Role::Consumer;
  body.flags = allLocked ? control_flag::LOCK : 0;
  body.a = channel;
  body.text = community;
  sendControl(std::move(fh), body);
}

void
Host::deliver(ApplicationId app, const YodelMessage& msg, const char* via)
{
  std::string data(msg.data.begin(), msg.data.end());
  std::string id = payloadMessageId(msg.data);
  Tick origin = m_ctx.now();
  auto bar = data.find('|');
  if (bar != std::string::npos) {
    try {
      origin = std::stoull(data.substr(bar + 1));
    }
    catch (const std::exception&) {
    }
  }
  Tick latency = m_ctx.now() >= origin ? m_ctx.now() - origin : 0;
  emit("DELIVER", {{"app", appName(app)}, {"ch", std::to_string(msg.floating.channelId.value_or(0))},
                   {"msg", id}, {"lat", std::to_string(latency)}, {"via", via}});
  m_ctx.metrics().deliveries[m_yni]++;
  m_ctx.metrics().latencyHistogram[latency]++;
}

void
Host::onChannelUpdate(const YodelMessage& msg, const ControlBody& body)
{
  const auto& fh = msg.floating;
  if (!fh.valleyId || !fh.namespaceId)
    return;
  ChannelId from = body.a;
  ChannelId to = body.b;
  std::vector<std::pair<Key, Membership>> moved;
  for (const auto& [key, m] : m_memberships) {
    if (std::get<1>(key) != *fh.valleyId || std::get<2>(key) != *fh.namespaceId ||
        std::get<3>(key) != body.text || m.channel != from)
      continue;
    Role table = std::get<4>(key);
    if (body.role != Role::Member && table != body.role)
      continue;
    moved.emplace_back(key, m);
  }
  for (auto& [key, m] : moved) {
    Role table = std::get<4>(key);
    auto* row = tableFor(table).find(std::get<0>(key), m.valley, from);
    if (row) {
      RegistrationRow copy = *row;
      tableFor(table).erase(copy.app, copy.valley, from);
      copy.channel = to;
      tableFor(table).upsert(copy);
    }
    m_memberships[key].channel = to;
  }
  if (m_edgeLocks.erase({*fh.valleyId, from}) > 0)
    m_edgeLocks.insert({*fh.valleyId, to});
  emit("CHANNEL_UPDATE", {{"comm", body.text}, {"from", std::to_string(from)}, {"to", std::to_string(to)},
                          {"rows", std::to_string(moved.size())}});
}

void
Host::handle(const YodelMessage& msg)
{
  if (msg.fixed.kind == MessageKind::DataYpp || msg.fixed.kind == MessageKind::AnycastDataYpp) {
    expireRows();
    const auto& fh = msg.floating;
    if (!fh.valleyId || !fh.channelId)
      return;
    std::vector<ApplicationId> candidates;
    std::vector<bool> locked;
    for (const auto& r : m_tables.crt.rows()) {
      if (r.valley != *fh.valleyId || r.channel != *fh.channelId)
        continue;
      candidates.push_back(r.app);
      locked.push_back(r.lock);
    }
    if (candidates.empty()) {
      emit("DROP", {{"ch", std::to_string(*fh.channelId)}, {"msg", payloadMessageId(msg.data)},
                    {"reason", "no-consumer"}});
      m_ctx.metrics().drops[m_yni]++;
      return;
    }
    auto mode = isAnycastKind(msg.fixed.kind) ? AnycastMode::randomized(m_ctx.config().pDeliver)
                                               : AnycastMode::dedicated();
    for (auto i : anycastFilter(AnycastStage::Host, locked, mode, m_rng))
      deliver(candidates[i], msg, "edge");
    return;
  }
  if (msg.fixed.kind != MessageKind::ControlYpp) {
    emit("ERROR", {{"from", msg.fixed.sender.toString()},
                   {"reason", "host got " + std::string(toString(msg.fixed.kind))}});
    return;
  }

  ControlBody body;
  try {
    body = ControlBody::decode(msg.data);
  }
  catch (const CodecError& e) {
    emit("ERROR", {{"from", msg.fixed.sender.toString()}, {"reason", e.what()}});
    return;
  }
  const auto& fh = msg.floating;

  switch (body.op) {
  case ControlOp::JoinAck:
    onJoinAck(msg, body);
    return;
  case ControlOp::ProducerLock: {
    if (!fh.valleyId || !fh.channelId || !fh.applicationId)
      return;
    auto* row = m_tables.prt.find(*fh.applicationId, *fh.valleyId, *fh.channelId);
    if (!row)
      return;
    row->lock = body.hasFlag(control_flag::LOCK);
    emit(row->lock ? "LOCK" : "UNLOCK", {{"app", appName(row->app)}, {"ch", std::to_string(row->channel)},
                                         {"role", "producer"}});
    return;
  }
  case ControlOp::ChannelUpdate:
    onChannelUpdate(msg, body);
    return;
  case ControlOp::TwinQuery: {
    expireRows();
    ControlBody reply;
    reply.op = ControlOp::TwinResponse;
    reply.text = m_tables.encode();
    sendControl({}, reply);
    return;
  }
  case ControlOp::ConnectAck:
    if (body.hasFlag(control_flag::FRESH)) {
      m_tables.prt.clear();
      m_tables.crt.clear();
      m_memberships.clear();
      m_pending.clear();
      m_edgeLocks.clear();
      emit("REG_RESET", {{"edge", msg.fixed.sender.toString()}});
    }
    else {
      emit(m_greeted ? "RECONNECTED" : "CONNECTED", {{"edge", msg.fixed.sender.toString()}});
    }
    m_greeted = true;
    if (!body.neighbors.empty() && m_alphorn != body.neighbors.front().yni) {
      if (m_alphorn)
        m_act.removeNeighbor(*m_alphorn);
      m_alphorn = body.neighbors.front().yni;
      m_act.addNeighbor(*m_alphorn, 0, "twin:" + m_alphorn->toString());
    }
    return;
  default:
    emit("ERROR", {{"from", msg.fixed.sender.toString()}, {"reason", "unexpected " + toString(body.op)}});
    return;
  }
}

void
Host::linkChanged(const Yni& neighbor, bool up)
{
  Node::linkChanged(neighbor, up);
  if (up && m_edge && neighbor == *m_edge) {
    ControlBody body;
    body.op = ControlOp::Reconnect;
    sendControl({}, body);
  }
}

} // namespace yodel

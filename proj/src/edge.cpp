#include "yodel/edge.hpp"

#include <algorithm>

namespace yodel {

FibRow*
ValleyFib::pptByChannel(ChannelId channel)
{
  for (auto& [key, row] : ppt) {
    if (!row.pending && row.channel == channel)
      return &row;
  }
  return nullptr;
}

FibRow*
ValleyFib::pctByChannel(ChannelId channel)
{
  for (auto& [key, row] : pct) {
    if (!row.pending && row.channel == channel)
      return &row;
  }
  return nullptr;
}

Edge::Edge(const Yni& yni, std::string name, NodeContext& ctx, Rng rng)
  : Node(yni, std::move(name), ctx, std::move(rng))
  , m_twins(yni)
{
}

std::vector<Edge::Table>
Edge::tablesFor(Role role)
{
  switch (role) {
  case Role::Producer:
    return {Table::Ppt};
  case Role::Consumer:
    return {Table::Pct};
  case Role::Member:
    return {Table::Ppt, Table::Pct};
  }
  return {};
}

const ValleyFib*
Edge::fib(ValleyNumber valley) const
{
  auto it = m_fibs.find(valley);
  return it == m_fibs.end() ? nullptr : &it->second;
}

void
Edge::attachHost(const Yni& host, Tick latency)
{
  m_hosts.insert(host);
  m_act.addNeighbor(host, latency);
  auto& twin = m_twins.create(host, m_ctx.now() + m_ctx.config().twinTimeout);
  m_act.addNeighbor(twin.alphorn, 0, "twin:" + twin.alphorn.toString());
  emit("TWIN_CREATE", {{"host", host.toString()}, {"alphorn", twin.alphorn.toString()}});
  sendConnectAck(host, twin.alphorn, false);
}

void
Edge::sendConnectAck(const Yni& host, const Yni& alphorn, bool fresh)
{
  ControlBody body;
  body.op = ControlOp::ConnectAck;
  body.flags = fresh ? control_flag::FRESH : 0;
  body.neighbors.push_back({alphorn, 0});
  sendTo(host, makeControl(m_yni, host, {}, body));
}

void
Edge::handle(const YodelMessage& msg)
{
  switch (msg.fixed.kind) {
  case MessageKind::DataYpp:
  case MessageKind::AnycastDataYpp:
    onHostData(msg);
    return;
  case MessageKind::DataYsync:
  case MessageKind::AnycastDataYsync:
    onNetworkData(msg);
    return;
  case MessageKind::ControlYpp:
    break;
  }

  ControlBody body;
  try {
    body = ControlBody::decode(msg.data);
  }
  catch (const CodecError& e) {
    emit("ERROR", {{"from", msg.fixed.sender.toString()}, {"reason", e.what()}});
    return;
  }

  switch (body.op) {
  case ControlOp::JoinRequest:
    onJoinRequest(msg, body);
    return;
  case ControlOp::Leave:
    onLeave(msg, body);
    return;
  case ControlOp::ConsumerLock:
    onConsumerLock(msg, body);
    return;
  case ControlOp::Reconnect:
    onReconnect(msg);
    return;
  case ControlOp::TwinResponse:
    onTwinResponse(msg, body);
    return;
  case ControlOp::ControllerJoinReply:
    onControllerReply(msg, body);
    return;
  case ControlOp::PathAdvertise:
    onPathAdvertise(msg, body);
    return;
  case ControlOp::PathWithdraw:
    onPathWithdraw(msg, body);
    return;
  case ControlOp::EdgeLock:
    onEdgeLock(msg, body);
    return;
  case ControlOp::ChannelUpdate:
    onChannelUpdate(msg, body);
    return;
  default:
    emit("ERROR", {{"from", msg.fixed.sender.toString()}, {"reason", "unexpected " + toString(body.op)}});
    return;
  }
}

// joins and leaves

void
Edge::onJoinRequest(const YodelMessage& msg, const ControlBody& body)
{
  const auto& fh = msg.floating;
  if (!fh.valleyId || !fh.namespaceId || !fh.applicationId) {
    emit("ERROR", {{"from", msg.fixed.sender.toString()}, {"reason", "join without valley, namespace or app"}});
    return;
  }
  ValleyNumber valley = *fh.valleyId;
  FibKey key{*fh.namespaceId, body.text};
  WaitingJoin join{msg.fixed.sender, *fh.applicationId, body.role};
  auto tables = tablesFor(body.role);
  auto& fib = m_fibs[valley];

  auto& primary = table(fib, tables.front());
  auto it = primary.find(key);
  if (it == primary.end()) {
    for (auto t : tables) {
      FibRow row;
      row.ns = key.first;
      row.community = key.second;
      row.model = body.model;
      row.joinedAs = body.role;
      table(fib, t).emplace(key, std::move(row));
    }
    primary.at(key).waiting.push_back(join);

    FloatingHeader cfh;
    cfh.valleyId = valley;
    cfh.namespaceId = key.first;
    ControlBody req;
    req.op = ControlOp::ControllerJoin;
    req.role = body.role;
    req.model = body.model;
    req.text = key.second;
    m_ctx.toController(makeControl(m_yni, Yni(), cfh, req));
    emit("JOIN_MISS", {{"host", join.host.toString()}, {"comm", key.second}, {"role", toString(body.role)}});
    return;
  }
  if (it->second.pending) {
    it->second.waiting.push_back(join);
    return;
  }
  if (body.role == Role::Member && fib.pct.count(key) == 0) {
    emit("ERROR", {{"from", join.host.toString()}, {"reason", "member join on a producer-only row"}});
    return;
  }
  admit(valley, key, join);
}

void
Edge::admit(ValleyNumber valley, const FibKey& key, const WaitingJoin& join)
{
  auto& fib = m_fibs[valley];
  bool locked = false;
  ChannelId channel = 0;
  ServiceModel model = ServiceModel::MSM;

  for (auto t : tablesFor(join.role)) {
    auto& row = table(fib, t).at(key);
    model = row.model;
    auto& entry = row.hosts[join.host];
    entry.apps.insert(join.app);
    if (t == Table::Pct) {
      m_consumerValleys[join.host].insert(valley);
      if (channel == 0)
        channel = row.channel;
      continue;
    }
    channel = row.channel;
    if (join.role != Role::Producer || !isSingleSource(row.model))
      continue;
    ProducerKey producer{join.host, join.app};
    if (row.activeProducer == producer)
      continue;
    if (row.onHold.count(producer) > 0) {
      locked = true;
      continue;
    }
    ProducerAdmission state;
    state.edgeKnown = true;
    state.edgeActive = !row.lock;
    state.edgeHasActiveProducer = row.activeProducer.has_value();
    auto directive = admitProducer(row.model, state);
    if (directive.lockHostRow) {
      row.onHold.insert(producer);
      locked = true;
    }
    else {
      row.activeProducer = producer;
    }
  }
  replyJoin(valley, key, join, channel, model, locked, false);
}

void
Edge::replyJoin(ValleyNumber valley, const FibKey& key, const WaitingJoin& join, ChannelId channel,
                ServiceModel model, bool locked, bool denied)
{
  FloatingHeader fh;
  fh.valleyId = valley;
  if (!denied)
    fh.channelId = channel;
  fh.namespaceId = key.first;
  fh.applicationId = join.app;
  ControlBody body;
  body.op = ControlOp::JoinAck;
  body.role = join.role;
  body.model = model;
  body.flags = static_cast<std::uint8_t>((locked ? control_flag::LOCK : 0) | (denied ? control_flag::DENIED : 0));
  body.a = channel;
  body.text = key.second;
  sendToHost(join.host, makeControl(m_yni, join.host, fh, body));
}

void
Edge::onControllerReply(const YodelMessage& msg, const ControlBody& body)
{
  const auto& fh = msg.floating;
  if (!fh.valleyId || !fh.namespaceId)
    return;
  ValleyNumber valley = *fh.valleyId;
  FibKey key{*fh.namespaceId, body.text};
  auto& fib = m_fibs[valley];
  auto tables = tablesFor(body.role);
  auto& primary = table(fib, tables.front());
  auto it = primary.find(key);
  if (it == primary.end() || !it->second.pending)
    return;

  auto waiting = std::move(it->second.waiting);
  it->second.waiting.clear();

  if (body.hasFlag(control_flag::DENIED)) {
    ServiceModel model = it->second.model;
    for (auto t : tables)
      table(fib, t).erase(key);
    for (const auto& join : waiting)
      replyJoin(valley, key, join, 0, model, false, true);
    return;
  }

  for (auto t : tables) {
    auto& row = table(fib, t).at(key);
    row.channel = body.a;
    row.model = body.model;
    row.pending = false;
    if (t == Table::Ppt)
      row.lock = body.hasFlag(control_flag::LOCK);
  }
  if (body.hasFlag(control_flag::LOCK))
    emit("LOCK", {{"comm", key.second}, {"ch", std::to_string(body.a)}, {"role", "edge"}});
  for (const auto& join : waiting)
    admit(valley, key, join);
  for (auto t : tables)
    retireIfEmpty(valley, key, t);
}

void
Edge::onLeave(const YodelMessage& msg, const ControlBody& body)
{
  const auto& fh = msg.floating;
  if (!fh.valleyId || !fh.namespaceId || !fh.applicationId)
    return;
  ValleyNumber valley = *fh.valleyId;
  FibKey key{*fh.namespaceId, body.text};
  const Yni& host = msg.fixed.sender;
  ApplicationId app = *fh.applicationId;
  auto& fib = m_fibs[valley];

  for (auto t : tablesFor(body.role)) {
    auto& rows = table(fib, t);
    auto it = rows.find(key);
    if (it == rows.end())
      continue;
    auto& row = it->second;
    std::erase_if(row.waiting, [&] (const WaitingJoin& w) { return w.host == host && w.app == app; });
    auto entry = row.hosts.find(host);
    if (entry != row.hosts.end()) {
      entry->second.apps.erase(app);
      if (entry->second.apps.empty())
        row.hosts.erase(entry);
    }
    if (t == Table::Ppt) {
      ProducerKey producer{host, app};
      row.onHold.erase(producer);
      if (row.activeProducer == producer) {
        row.activeProducer.reset();
        failoverLocal(valley, row);
      }
    }
  }
  for (auto t : tablesFor(body.role))
    retireIfEmpty(valley, key, t);
}

void
Edge::failoverLocal(ValleyNumber valley, FibRow& row)
{
  if (row.lock || row.activeProducer || row.pending)
    return;
  auto next = nextLocalProducer(row.onHold);
  if (!next)
    return;
  row.onHold.erase(*next);
  row.activeProducer = next;
  sendProducerLock(valley, row, *next, false);
}

void
Edge::sendProducerLock(ValleyNumber valley, const FibRow& row, const ProducerKey& producer, bool lock)
{
  FloatingHeader fh;
  fh.valleyId = valley;
  fh.channelId = row.channel;
  fh.namespaceId = row.ns;
  fh.applicationId = producer.second;
  ControlBody body;
  body.op = ControlOp::ProducerLock;
  body.role = Role::Producer;
  body.flags = lock ? control_flag::LOCK : 0;
  body.model = row.model;
  body.a = row.channel;
  body.text = row.community;
  emit(lock ? "LOCK" : "UNLOCK", {{"host", producer.first.toString()}, {"app", std::to_string(producer.second)},
                                  {"ch", std::to_string(row.channel)}, {"role", "producer"}});
  sendToHost(producer.first, makeControl(m_yni, producer.first, fh, body));
}

void
Edge::retireIfEmpty(ValleyNumber valley, const FibKey& key, Table t)
{
  auto& fib = m_fibs[valley];
  auto& rows = table(fib, t);
  auto it = rows.find(key);
  if (it == rows.end() || it->second.pending || !it->second.hosts.empty())
    return;
  Role role = it->second.joinedAs;
  if (role == Role::Member) {
    // member rows leave together
    auto& other = table(fib, t == Table::Ppt ? Table::Pct : Table::Ppt);
    auto o = other.find(key);
    if (o != other.end() && !o->second.hosts.empty())
      return;
    if (o != other.end())
      other.erase(o);
  }
  else {
    role = t == Table::Ppt ? Role::Producer : Role::Consumer;
  }
  ChannelId channel = it->second.channel;
  ServiceModel model = it->second.model;
  if (t == Table::Ppt || role == Role::Member)
    fib.aft.erase(channel);
  rows.erase(it);

  FloatingHeader fh;
  fh.valleyId = valley;
  fh.channelId = channel;
  fh.namespaceId = key.first;
  ControlBody body;
  body.op = ControlOp::RemoveRole;
  body.role = role;
  body.model = model;
  body.a = channel;
  body.text = key.second;
  m_ctx.toController(makeControl(m_yni, Yni(), fh, body));
}

void
Edge::removeHostFromRow(ValleyNumber valley, const FibKey& key, Table t, const Yni& entryKey,
                        const Yni& host)
{
  auto& rows = table(m_fibs[valley], t);
  auto it = rows.find(key);
  if (it == rows.end())
    return;
  auto& row = it->second;
  row.hosts.erase(entryKey);
  std::erase_if(row.waiting, [&] (const WaitingJoin& w) { return w.host == host; });
  if (t == Table::Ppt) {
    std::erase_if(row.onHold, [&] (const ProducerKey& p) { return p.first == host; });
    if (row.activeProducer && row.activeProducer->first == host) {
      row.activeProducer.reset();
      failoverLocal(valley, row);
    }
  }
}

void
Edge::purgeHost(const Yni& host)
{
  std::optional<Yni> alphorn;
  if (const auto* row = m_twins.hatRow(host))
    alphorn = row->alphorn;

  for (auto& [valley, fib] : m_fibs) {
    for (auto t : {Table::Ppt, Table::Pct}) {
      std::vector<std::pair<FibKey, Yni>> hits;
      for (const auto& [key, row] : table(fib, t)) {
        if (row.hosts.count(host) > 0)
          hits.emplace_back(key, host);
        else if (alphorn && row.hosts.count(*alphorn) > 0)
          hits.emplace_back(key, *alphorn);
        else if (std::any_of(row.waiting.begin(), row.waiting.end(),
                             [&] (const WaitingJoin& w) { return w.host == host; }))
          hits.emplace_back(key, host);
      }
      for (const auto& [key, entryKey] : hits)
        removeHostFromRow(valley, key, t, entryKey, host);
    }
  }
  // rows are retired only after every table is clean, so member pairs go together
  for (auto& [valley, fib] : m_fibs) {
    for (auto t : {Table::Ppt, Table::Pct}) {
      std::vector<FibKey> keys;
      for (const auto& [key, row] : table(fib, t))
        keys.push_back(key);
      for (const auto& key : keys)
        retireIfEmpty(valley, key, t);
    }
  }
  m_consumerValleys.erase(host);
}

// control from the controller

void
Edge::onPathAdvertise(const YodelMessage& msg, const ControlBody& body)
{
  const auto& fh = msg.floating;
  if (!fh.valleyId || !body.tree) {
    emit("ERROR", {{"reason", "path advertisement without valley or tree"}});
    return;
  }
  if (body.tree->yni != m_yni) {
    emit("ERROR", {{"reason", "path advertisement rooted at " + body.tree->yni.toString()}});
    return;
  }
  auto fit = m_fibs.find(*fh.valleyId);
  if (fit == m_fibs.end() || !fit->second.pptByChannel(body.a)) {
    emit("ADV_IGNORED", {{"ch", std::to_string(body.a)}});
    return;
  }
  fit->second.aft[body.a] = *body.tree;
  emit("PATH_INSTALL", {{"ch", std::to_string(body.a)}, {"nodes", std::to_string(body.tree->nodeCount())}});
}

void
Edge::onPathWithdraw(const YodelMessage& msg, const ControlBody& body)
{
  const auto& fh = msg.floating;
  if (!fh.valleyId)
    return;
  auto fit = m_fibs.find(*fh.valleyId);
  if (fit == m_fibs.end())
    return;
  if (fit->second.aft.erase(body.a) > 0)
    emit("PATH_REMOVE", {{"ch", std::to_string(body.a)}});
}

void
Edge::onEdgeLock(const YodelMessage& msg, const ControlBody& body)
{
  const auto& fh = msg.floating;
  if (!fh.valleyId || !fh.namespaceId)
    return;
  ValleyNumber valley = *fh.valleyId;
  auto& fib = m_fibs[valley];
  auto it = fib.ppt.find({*fh.namespaceId, body.text});
  if (it == fib.ppt.end() || it->second.pending) {
    emit("LOCK_IGNORED", {{"comm", body.text}});
    return;
  }
  auto& row = it->second;
  bool lock = body.hasFlag(control_flag::LOCK);
  row.lock = lock;
  emit(lock ? "LOCK" : "UNLOCK", {{"comm", body.text}, {"ch", std::to_string(row.channel)}, {"role", "edge"}});
  if (lock) {
    if (row.activeProducer) {
      auto producer = *row.activeProducer;
      row.activeProducer.reset();
      row.onHold.insert(producer);
      sendProducerLock(valley, row, producer, true);
    }
  }
  else {
    failoverLocal(valley, row);
  }
}

void
Edge::onChannelUpdate(const YodelMessage& msg, const ControlBody& body)
{
  const auto& fh = msg.floating;
  if (!fh.valleyId || !fh.namespaceId)
    return;
  ValleyNumber valley = *fh.valleyId;
  auto& fib = m_fibs[valley];
  FibKey key{*fh.namespaceId, body.text};
  std::set<Yni> targets;
  for (auto t : tablesFor(body.role)) {
    auto& rows = table(fib, t);
    auto it = rows.find(key);
    if (it == rows.end() || it->second.channel != body.a)
      continue;
    it->second.channel = body.b;
    for (const auto& [h, entry] : it->second.hosts)
      targets.insert(h);
  }
  emit("CHANNEL_UPDATE", {{"comm", body.text}, {"from", std::to_string(body.a)}, {"to", std::to_string(body.b)},
                          {"hosts", std::to_string(targets.size())}});
  for (const auto& h : targets) {
    FloatingHeader hfh;
    hfh.valleyId = valley;
    hfh.channelId = body.b;
    hfh.namespaceId = key.first;
    ControlBody fwd = body;
    sendToHost(h, makeControl(m_yni, h, hfh, fwd));
  }
}

// control from hosts

void
Edge::onConsumerLock(const YodelMessage& msg, const ControlBody& body)
{
  const auto& fh = msg.floating;
  if (!fh.valleyId || !fh.namespaceId)
    return;
  auto& fib = m_fibs[*fh.valleyId];
  auto it = fib.pct.find({*fh.namespaceId, body.text});
  if (it == fib.pct.end())
    return;
  auto entry = it->second.hosts.find(msg.fixed.sender);
  if (entry == it->second.hosts.end())
    return;
  entry->second.locked = body.hasFlag(control_flag::LOCK);
  emit(entry->second.locked ? "LOCK" : "UNLOCK", {{"host", msg.fixed.sender.toString()},
                                                  {"ch", std::to_string(it->second.channel)},
                                                  {"role", "consumer"}});
}

// data

void
Edge::onHostData(const YodelMessage& msg)
{
  const auto& fh = msg.floating;
  const Yni& host = msg.fixed.sender;
  if (!fh.valleyId || !fh.channelId)
    return;
  auto fit = m_fibs.find(*fh.valleyId);
  FibRow* row = fit == m_fibs.end() ? nullptr : fit->second.pptByChannel(*fh.channelId);
  if (!row || row->hosts.count(host) == 0) {
    emit("DROP", {{"from", host.toString()}, {"ch", std::to_string(*fh.channelId)},
                  {"msg", payloadMessageId(msg.data)}, {"reason", "unknown-channel"}});
    m_ctx.metrics().drops[m_yni]++;
    return;
  }
  if (row->lock) {
    emit("DROP", {{"from", host.toString()}, {"ch", std::to_string(*fh.channelId)},
                  {"msg", payloadMessageId(msg.data)}, {"reason", "edge-locked"}});
    m_ctx.metrics().drops[m_yni]++;
    return;
  }
  deliverLocal(*fh.valleyId, msg, host);
  sourceYsync(*fh.valleyId, *fh.channelId, msg);
}

void
Edge::sourceYsync(ValleyNumber valley, ChannelId channel, const YodelMessage& msg)
{
  auto& fib = m_fibs[valley];
  auto it = fib.aft.find(channel);
  if (it == fib.aft.end())
    return;
  YodelMessage ys;
  ys.fixed.kind = isAnycastKind(msg.fixed.kind) ? MessageKind::AnycastDataYsync : MessageKind::DataYsync;
  ys.fixed.sender = m_yni;
  ys.fixed.receiver = m_yni;
  ys.floating.valleyId = valley;
  ys.floating.channelId = channel;
  ys.floating.pathTree = it->second;
  ys.data = msg.data;
  ys.finalize();
  std::vector<YodelMessage> children;
  for (auto& [next, fwd] : popPathRoot(ys, m_yni))
    children.push_back(std::move(fwd));
  forward(std::move(children));
}

void
Edge::onNetworkData(const YodelMessage& msg)
{
  std::vector<YodelMessage> children;
  try {
    for (auto& [next, fwd] : popPathRoot(msg, m_yni))
      children.push_back(std::move(fwd));
  }
  catch (const CodecError&) {
    emit("ROOT_MISMATCH", {{"from", msg.fixed.sender.toString()}, {"msg", payloadMessageId(msg.data)}});
    return;
  }
  if (msg.floating.valleyId)
    deliverLocal(*msg.floating.valleyId, msg, std::nullopt);
  forward(std::move(children));
}

void
Edge::deliverLocal(ValleyNumber valley, const YodelMessage& msg, const std::optional<Yni>& exclude)
{
  auto fit = m_fibs.find(valley);
  if (fit == m_fibs.end() || !msg.floating.channelId)
    return;
  FibRow* row = fit->second.pctByChannel(*msg.floating.channelId);
  if (!row)
    return;

  std::vector<Yni> candidates;
  std::vector<bool> locked;
  for (const auto& [h, entry] : row->hosts) {
    if (exclude && h == *exclude)
      continue;
    candidates.push_back(h);
    locked.push_back(entry.locked);
  }
  bool anycast = isAnycastKind(msg.fixed.kind);
  auto mode = anycast ? AnycastMode::randomized(m_ctx.config().pDeliver) : AnycastMode::dedicated();
  ChannelId channel = *msg.floating.channelId;
  for (auto i : anycastFilter(AnycastStage::Edge, locked, mode, m_rng)) {
    YodelMessage out;
    out.fixed.kind = anycast ? MessageKind::AnycastDataYpp : MessageKind::DataYpp;
    out.fixed.sender = m_yni;
    out.fixed.receiver = candidates[i];
    out.floating.valleyId = valley;
    out.floating.channelId = channel;
    out.data = msg.data;
    out.finalize();
    sendToHost(candidates[i], std::move(out));
  }
}

void
Edge::sendToHost(const Yni& target, YodelMessage msg)
{
  if (auto host = m_twins.hostOfAlphorn(target)) {
    auto* twin = m_twins.find(*host);
    if (twin && twin->active) {
      msg.fixed.sender = m_yni;
      msg.fixed.receiver = *host;
      msg.finalize();
      bool data = isDataKind(msg.fixed.kind);
      std::string id = data ? payloadMessageId(msg.data) : std::string();
      auto dropped = m_twins.bufferMessage(*host, {m_ctx.now(), std::move(msg)}, m_ctx.config().twinBufferMax);
      emit("TWIN_BUFFER", {{"host", host->toString()}, {"msg", data ? id : std::string("control")},
                           {"size", std::to_string(twin->buffer.size())}});
      auto& peak = m_ctx.metrics().bufferPeaks[m_yni];
      peak = std::max<std::uint64_t>(peak, twin->buffer.size());
      if (dropped > 0) {
        emit("DROP", {{"host", host->toString()}, {"reason", "twin-buffer-full"},
                      {"count", std::to_string(dropped)}});
        m_ctx.metrics().drops[m_yni] += dropped;
      }
      return;
    }
  }
  sendTo(target, std::move(msg));
}

// twins

void
Edge::syncTick()
{
  const auto& cfg = m_ctx.config();
  for (const auto& row : m_twins.hat()) {
    auto* twin = m_twins.find(row.host);
    if (!twin || twin->active)
      continue;
    if (twin->awaiting) {
      twin->missed++;
      emit("TWIN_MISS", {{"host", row.host.toString()}, {"missed", std::to_string(twin->missed)}});
      if (twin->missed >= cfg.twinThreshold) {
        activateTwin(row.host);
        continue;
      }
    }
    twin->awaiting = true;
    ControlBody body;
    body.op = ControlOp::TwinQuery;
    sendTo(row.host, makeControl(m_yni, row.host, {}, body));
  }
  for (const auto& host : m_twins.expired(m_ctx.now()))
    expireTwin(host);
}

void
Edge::onTwinResponse(const YodelMessage& msg, const ControlBody& body)
{
  const Yni& host = msg.fixed.sender;
  auto* twin = m_twins.find(host);
  if (!twin)
    return;
  try {
    twin->replica = RegistrationTables::decode(body.text);
  }
  catch (const std::invalid_argument& e) {
    emit("ERROR", {{"from", host.toString()}, {"reason", e.what()}});
    return;
  }
  twin->awaiting = false;
  twin->missed = 0;
  m_twins.resetTimer(host, m_ctx.now() + m_ctx.config().twinTimeout);
}

void
Edge::swapPct(const Yni& from, const Yni& to, const Yni& host, const char* direction)
{
  auto vit = m_consumerValleys.find(host);
  if (vit == m_consumerValleys.end())
    return;
  for (auto valley : vit->second) {
    auto fit = m_fibs.find(valley);
    if (fit == m_fibs.end())
      continue;
    std::size_t rows = 0;
    for (auto& [key, row] : fit->second.pct) {
      auto entry = row.hosts.find(from);
      if (entry == row.hosts.end())
        continue;
      HostEntry moved = std::move(entry->second);
      row.hosts.erase(entry);
      row.hosts[to] = std::move(moved);
      ++rows;
    }
    if (rows > 0)
      emit("TWIN_SWAP", {{"host", host.toString()}, {"valley", std::to_string(valley)},
                         {"rows", std::to_string(rows)}, {"dir", direction}});
  }
}

void
Edge::activateTwin(const Yni& host)
{
  auto* twin = m_twins.find(host);
  if (!twin || twin->active)
    return;
  twin->active = true;
  twin->awaiting = false;
  emit("TWIN_ACTIVE", {{"host", host.toString()}, {"alphorn", twin->alphorn.toString()}});
  swapPct(host, twin->alphorn, host, "out");
}

void
Edge::onReconnect(const YodelMessage& msg)
{
  const Yni& host = msg.fixed.sender;
  if (m_hosts.count(host) == 0)
    return;
  auto* twin = m_twins.find(host);
  if (!twin) {
    auto& fresh = m_twins.create(host, m_ctx.now() + m_ctx.config().twinTimeout);
    m_act.addNeighbor(fresh.alphorn, 0, "twin:" + fresh.alphorn.toString());
    emit("TWIN_CREATE", {{"host", host.toString()}, {"alphorn", fresh.alphorn.toString()}, {"fresh", "1"}});
    sendConnectAck(host, fresh.alphorn, true);
    return;
  }
  if (twin->active) {
    Yni alphorn = twin->alphorn;
    swapPct(alphorn, host, host, "back");
    auto buffered = m_twins.takeBuffer(host);
    std::size_t data = 0;
    for (auto& b : buffered) {
      if (isDataKind(b.msg.fixed.kind))
        ++data;
      sendTo(host, std::move(b.msg));
    }
    twin->active = false;
    emit("TWIN_FLUSH", {{"host", host.toString()}, {"count", std::to_string(data)},
                        {"total", std::to_string(buffered.size())}});
  }
  twin->awaiting = false;
  twin->missed = 0;
  m_twins.resetTimer(host, m_ctx.now() + m_ctx.config().twinTimeout);
  sendConnectAck(host, twin->alphorn, false);
}

void
Edge::expireTwin(const Yni& host)
{
  auto* twin = m_twins.find(host);
  if (!twin)
    return;
  Yni alphorn = twin->alphorn;
  emit("TWIN_EXPIRE", {{"host", host.toString()}, {"alphorn", alphorn.toString()},
                       {"buffered", std::to_string(twin->buffer.size())}});
  purgeHost(host);
  m_twins.destroy(host);
  m_act.removeNeighbor(alphorn);
}

void
Edge::hostCrashed(const Yni& host)
{
  if (m_hosts.count(host) == 0)
    return;
  emit("HOST_PURGE", {{"host", host.toString()}, {"reason", "crash"}});
  purgeHost(host);
  if (const auto* row = m_twins.hatRow(host))
    m_act.removeNeighbor(row->alphorn);
  m_twins.destroy(host);
}

} // namespace yodel

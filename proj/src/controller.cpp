#include "yodel/controller.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace yodel {

namespace {

std::string
roleKey(Role role)
{
  return toString(role);
}

/// Smallest total latency from any node of @p sources to every node.
std::map<Yni, Tick>
latencyFrom(const TopologyGraph& graph, const std::set<Yni>& sources)
{
  using Item = std::pair<Tick, Yni>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  std::map<Yni, Tick> dist;
  for (const auto& s : sources) {
    dist[s] = 0;
    queue.push({0, s});
  }
  while (!queue.empty()) {
    auto [d, u] = queue.top();
    queue.pop();
    if (d > dist[u])
      continue;
    for (const auto& [v, lat] : graph.adjacency(u)) {
      auto it = dist.find(v);
      if (it == dist.end() || d + lat < it->second) {
        dist[v] = d + lat;
        queue.push({d + lat, v});
      }
    }
  }
  return dist;
}

} // namespace

Controller::Controller(const Yni& yni, NodeContext& ctx)
  : m_yni(yni)
  , m_ctx(ctx)
{
}

void
Controller::registerUser(const UserId& user)
{
  m_users.insert(user);
}

Yni
Controller::provisionHost(const UserId& user, const HostIntent& intent) const
{
  if (!hasUser(user))
    throw ControllerError(ControllerError::Code::AuthFailed, "unknown credentials '" + user.id + "'");

  std::map<Yni, Tick> estimate;
  if (intent.preferredDomain) {
    std::set<Yni> sources;
    for (const auto& [yni, info] : m_graph.nodes()) {
      if (info.domain == *intent.preferredDomain)
        sources.insert(yni);
    }
    estimate = latencyFrom(m_graph, sources);
  }

  using Score = std::tuple<int, Tick, double, Yni>;
  std::optional<Score> best;
  for (const auto& [yni, info] : m_graph.nodes()) {
    if (info.role != NodeRole::Edge)
      continue;
    Tick latency = 0;
    if (intent.preferredDomain) {
      auto it = estimate.find(yni);
      latency = it == estimate.end() ? std::numeric_limits<Tick>::max() : it->second;
    }
    bool meets = (!intent.preferredDomain || info.domain == *intent.preferredDomain) &&
                 (!intent.maxLatency || latency <= *intent.maxLatency);
    auto attached = m_attachedHosts.find(yni);
    double remaining = info.stats.compute - (attached == m_attachedHosts.end() ? 0 : attached->second);
    Score score{meets ? 0 : 1, latency, -remaining, yni};
    if (!best || score < *best)
      best = score;
  }
  if (!best)
    throw ControllerError(ControllerError::Code::NoEdgeAvailable, "no edge node registered");
  return std::get<3>(*best);
}

void
Controller::noteHostAttached(const Yni& edge, int delta)
{
  m_attachedHosts[edge] += delta;
}

void
Controller::registerInfrastructureNode(const Yni& yni, NodeRole role, const std::string& domain,
                                       const std::vector<NeighborEntry>& neighbors,
                                       const NodeStats& stats)
{
  m_graph.registerNode(yni, role, domain, neighbors, stats);
  recomputeAll();
}

AccessGrant
Controller::resolveAccess(const UserId& user, const std::string& valley, const std::string& ns) const
{
  using Code = ControllerError::Code;
  auto v = m_registry.findValley(valley);
  if (!v)
    throw ControllerError(Code::UnknownValley, "unknown valley '" + valley + "'");
  const auto* rec = m_registry.vib(v->id).findNamespace(ns);
  if (!rec)
    throw ControllerError(Code::UnknownNamespace, "unknown namespace '" + ns + "'");
  if (!m_registry.isMember(v->id, user) || !m_registry.authorizeAccess(user, v->id, ns))
    throw ControllerError(Code::AccessDenied, "user '" + user.id + "' may not access " + valley + "/" + ns);
  return {v->id, rec->id, rec->serviceModel, rec->anycast};
}

Flow&
Controller::flowFor(ValleyNumber valley, NamespaceNumber ns, const std::string& community)
{
  FlowKey key{valley, ns, community};
  auto it = m_flows.find(key);
  if (it != m_flows.end())
    return it->second;

  auto& vib = m_registry.vib(valley);
  const auto* rec = vib.findNamespace(ns);
  auto& comm = m_registry.ensureCommunity(valley, rec->name, community);

  Flow flow;
  flow.valley = valley;
  flow.ns = ns;
  flow.namespaceName = rec->name;
  flow.community = community;
  flow.model = rec->serviceModel;
  flow.flowChannel = vib.allocateChannelId();
  comm.flowChannel = flow.flowChannel;
  if (isPartitioned(flow.model) && m_ctx.config().partitioning)
    flow.partitions.push_back({flow.flowChannel, std::nullopt, {}});
  return m_flows.emplace(key, std::move(flow)).first->second;
}

Flow*
Controller::findFlowMutable(ValleyNumber valley, NamespaceNumber ns, const std::string& community)
{
  auto it = m_flows.find({valley, ns, community});
  return it == m_flows.end() ? nullptr : &it->second;
}

const Flow*
Controller::findFlow(ValleyNumber valley, NamespaceNumber ns, const std::string& community) const
{
  auto it = m_flows.find({valley, ns, community});
  return it == m_flows.end() ? nullptr : &it->second;
}

std::vector<const Flow*>
Controller::flows() const
{
  std::vector<const Flow*> out;
  for (const auto& [key, flow] : m_flows)
    out.push_back(&flow);
  return out;
}

std::vector<ChannelObject>
Controller::channelsOf(const Flow& flow) const
{
  return flow.channels([this] (const Yni& n) {
    return m_graph.hasNode(n) && m_graph.node(n).role == NodeRole::Connector;
  });
}

EdgeJoinResult
Controller::handleEdgeJoin(ValleyNumber valley, NamespaceNumber ns, const std::string& community,
                           const Yni& edge, Role role)
{
  using Code = ControllerError::Code;
  const auto* vib = m_registry.findVib(valley);
  if (!vib)
    throw ControllerError(Code::UnknownValley, "unknown valley " + std::to_string(valley));
  if (!vib->findNamespace(ns))
    throw ControllerError(Code::UnknownNamespace, "unknown namespace " + std::to_string(ns));
  if (!m_graph.hasNode(edge) || m_graph.node(edge).role != NodeRole::Edge)
    throw ControllerError(Code::UnregisteredEdge, "edge " + edge.toString() + " is not registered");

  Flow& flow = flowFor(valley, ns, community);
  emit("JOIN", {{"edge", edge.toString()}, {"comm", flow.label()}, {"role", roleKey(role)}});
  m_ctx.metrics().controllerVisits[edge.toString() + "|" + flow.label() + "|" + roleKey(role)]++;

  EdgeJoinResult result;
  if (role == Role::Producer || role == Role::Member)
    result.locked = addProducerEdge(flow, edge);
  if (role == Role::Consumer || role == Role::Member)
    addConsumerEdge(flow, edge);
  result.channel = role == Role::Consumer ? flow.consumerChannel(edge) : flow.producerChannel(edge);

  FloatingHeader fh;
  fh.valleyId = valley;
  fh.channelId = result.channel;
  fh.namespaceId = ns;
  ControlBody body;
  body.op = ControlOp::ControllerJoinReply;
  body.role = role;
  body.flags = result.locked ? control_flag::LOCK : 0;
  body.model = flow.model;
  body.a = result.channel;
  body.text = community;
  m_ctx.fromController(makeControl(m_yni, edge, fh, body));

  flushPending(flow);
  return result;
}

void
Controller::removeEdgeRole(ValleyNumber valley, NamespaceNumber ns, const std::string& community,
                           const Yni& edge, Role role)
{
  Flow* flow = findFlowMutable(valley, ns, community);
  bool known = false;
  if (flow) {
    bool producer = flow->producerEdges.count(edge) > 0;
    bool consumer = flow->consumerEdges.count(edge) > 0;
    known = (role == Role::Producer && producer) || (role == Role::Consumer && consumer) ||
            (role == Role::Member && (producer || consumer));
  }
  if (!known)
    throw ControllerError(ControllerError::Code::UnknownMembership,
                          "edge " + edge.toString() + " holds no " + roleKey(role) + " role in " +
                          std::to_string(valley) + "/" + std::to_string(ns) + "/" + community);

  emit("ROLE_REMOVED", {{"edge", edge.toString()}, {"comm", flow->label()}, {"role", roleKey(role)}});
  if (role == Role::Producer || role == Role::Member)
    dropProducerEdge(*flow, edge);
  if (role == Role::Consumer || role == Role::Member)
    dropConsumerEdge(*flow, edge);
  flushPending(*flow);
}

void
Controller::repartition(ValleyNumber valley, NamespaceNumber ns, const std::string& community)
{
  Flow* flow = findFlowMutable(valley, ns, community);
  if (!flow)
    throw ControllerError(ControllerError::Code::UnknownMembership, "no flow for " + community);
  if (!flow->isPartitioned())
    throw PreconditionViolation("flow " + flow->label() + " does not partition");

  std::set<Yni> producers;
  for (const auto& [e, active] : flow->producerEdges)
    producers.insert(e);
  auto& vib = m_registry.vib(valley);
  auto plan = partitionFlow(flow->model, flow->partitions, producers, flow->consumerEdges,
                            [&vib] { return vib.allocateChannelId(); });
  applyPartitionPlan(*flow, plan);
  flushPending(*flow);
}

bool
Controller::addProducerEdge(Flow& flow, const Yni& edge)
{
  auto existing = flow.producerEdges.find(edge);
  if (existing != flow.producerEdges.end())
    return !existing->second;

  if (flow.isPartitioned()) {
    flow.producerEdges[edge] = true;
    std::set<Yni> producers;
    for (const auto& [e, active] : flow.producerEdges)
      producers.insert(e);
    auto& vib = m_registry.vib(flow.valley);
    auto plan = partitionFlow(flow.model, flow.partitions, producers, flow.consumerEdges,
                              [&vib] { return vib.allocateChannelId(); });
    applyPartitionPlan(flow, plan);
    return false;
  }

  ProducerAdmission state;
  state.scopeHasActiveEdge = !flow.activeProducerEdges().empty();
  auto lock = admitProducer(flow.model, state);
  flow.producerEdges[edge] = !lock.lockEdgeRow;
  return lock.lockEdgeRow;
}

void
Controller::addConsumerEdge(Flow& flow, const Yni& edge)
{
  flow.consumerEdges.insert(edge);
  if (flow.isPartitioned()) {
    for (const auto& p : flow.partitions) {
      if (p.consumerEdges.count(edge) > 0)
        return;
    }
    auto i = choosePartition(flow.partitions, edge);
    flow.partitions[i].consumerEdges.insert(edge);
  }
}

void
Controller::dropProducerEdge(Flow& flow, const Yni& edge)
{
  auto it = flow.producerEdges.find(edge);
  if (it == flow.producerEdges.end())
    return;
  bool wasActive = it->second;
  flow.producerEdges.erase(it);
  flow.precomputed.erase(edge);

  if (flow.isPartitioned()) {
    for (std::size_t i = 0; i < flow.partitions.size(); ++i) {
      if (flow.partitions[i].producerEdge != edge)
        continue;
      auto merge = mergePartition(flow.partitions, i);
      if (!merge) {
        flow.partitions[i].producerEdge.reset();
        break;
      }
      const auto& survivor = flow.partitions[merge->survivor];
      emit("MERGE", {{"comm", flow.label()}, {"retired", std::to_string(merge->retired)},
                     {"into", std::to_string(survivor.channel)},
                     {"moved", std::to_string(merge->moved.size())}});
      for (const auto& c : merge->moved)
        m_pendingUpdates.emplace_back(c, Role::Consumer, merge->retired, survivor.channel);
      break;
    }
    return;
  }

  if (isSingleSource(flow.model) && wasActive) {
    auto next = nextProducerEdge(flow.producerEdges);
    if (next) {
      flow.producerEdges[*next] = true;
      emit("FAILOVER", {{"comm", flow.label()}, {"from", edge.toString()}, {"to", next->toString()}});
      m_pendingUnlocks.push_back(*next);
    }
  }
}

void
Controller::dropConsumerEdge(Flow& flow, const Yni& edge)
{
  flow.consumerEdges.erase(edge);
  for (auto& p : flow.partitions)
    p.consumerEdges.erase(edge);
}

void
Controller::applyPartitionPlan(Flow& flow, const PartitionPlan& plan)
{
  flow.partitions = plan.partitions;
  std::string layout;
  for (const auto& p : flow.partitions) {
    if (!layout.empty())
      layout += ";";
    layout += std::to_string(p.channel) + ":" +
              (p.producerEdge ? p.producerEdge->toString() : std::string("-")) + ":" +
              std::to_string(p.consumerEdges.size());
  }
  emit("PARTITION", {{"comm", flow.label()}, {"count", std::to_string(flow.partitions.size())},
                     {"layout", layout}});
  for (const auto& [edge, move] : plan.consumerMoves)
    m_pendingUpdates.emplace_back(edge, Role::Consumer, move.first, move.second);
}

void
Controller::flushPending(Flow& flow)
{
  auto updates = std::exchange(m_pendingUpdates, {});
  for (const auto& [edge, role, from, to] : updates)
    sendChannelUpdate(flow, edge, role, from, to);
  recompute(flow);
  auto unlocks = std::exchange(m_pendingUnlocks, {});
  for (const auto& edge : unlocks)
    sendEdgeLock(flow, edge, false);
}

void
Controller::sendChannelUpdate(const Flow& flow, const Yni& edge, Role role, ChannelId from, ChannelId to)
{
  FloatingHeader fh;
  fh.valleyId = flow.valley;
  fh.channelId = to;
  fh.namespaceId = flow.ns;
  ControlBody body;
  body.op = ControlOp::ChannelUpdate;
  body.role = role;
  body.model = flow.model;
  body.a = from;
  body.b = to;
  body.text = flow.community;
  m_ctx.fromController(makeControl(m_yni, edge, fh, body));
}

void
Controller::sendEdgeLock(const Flow& flow, const Yni& edge, bool lock)
{
  FloatingHeader fh;
  fh.valleyId = flow.valley;
  fh.channelId = flow.producerChannel(edge);
  fh.namespaceId = flow.ns;
  ControlBody body;
  body.op = ControlOp::EdgeLock;
  body.role = Role::Producer;
  body.flags = lock ? control_flag::LOCK : 0;
  body.model = flow.model;
  body.a = flow.producerChannel(edge);
  body.text = flow.community;
  m_ctx.fromController(makeControl(m_yni, edge, fh, body));
}

std::set<Yni>
Controller::pathTargets(const Flow& flow, ChannelId channel, const Yni& source) const
{
  std::set<Yni> targets;
  if (flow.isPartitioned()) {
    for (const auto& p : flow.partitions) {
      if (p.channel == channel)
        targets = p.consumerEdges;
    }
  }
  else {
    targets = flow.consumerEdges;
  }
  targets.erase(source);
  return targets;
}

PathObject
Controller::computePath(const Flow& flow, ChannelId channel, const Yni& source) const
{
  auto result = shortestPathTree(m_graph, source, pathTargets(flow, channel, source));
  if (!result.unreachable.empty())
    throw UnreachableConsumer(result.unreachable);
  return {source, std::move(result.tree), channel, flow.valley};
}

void
Controller::recompute(Flow& flow)
{
  // (channel, source) pairs that should carry a path
  std::vector<std::pair<ChannelId, Yni>> sources;
  if (flow.isPartitioned()) {
    for (const auto& p : flow.partitions) {
      if (p.producerEdge)
        sources.emplace_back(p.channel, *p.producerEdge);
    }
  }
  else {
    for (const auto& e : flow.activeProducerEdges())
      sources.emplace_back(flow.flowChannel, e);
  }

  std::map<std::pair<ChannelId, Yni>, PathObject> desired;
  for (const auto& key : sources) {
    auto targets = pathTargets(flow, key.first, key.second);
    if (targets.empty()) {
      flow.unreachable.erase(key);
      continue;
    }
    auto result = shortestPathTree(m_graph, key.second, targets);
    auto& missed = flow.unreachable[key];
    for (const auto& u : result.unreachable) {
      if (missed.count(u) == 0)
        emit("UNREACHABLE", {{"comm", flow.label()}, {"ch", std::to_string(key.first)},
                             {"source", key.second.toString()}, {"edge", u.toString()}});
    }
    missed = result.unreachable;
    if (!result.tree.children.empty())
      desired[key] = {key.second, std::move(result.tree), key.first, flow.valley};
  }
  for (auto it = flow.unreachable.begin(); it != flow.unreachable.end();) {
    if (std::find(sources.begin(), sources.end(), it->first) == sources.end())
      it = flow.unreachable.erase(it);
    else
      ++it;
  }

  for (auto it = flow.advertised.begin(); it != flow.advertised.end();) {
    if (desired.count(it->first) > 0) {
      ++it;
      continue;
    }
    const auto& path = it->second;
    FloatingHeader fh;
    fh.valleyId = flow.valley;
    fh.channelId = path.channel;
    ControlBody body;
    body.op = ControlOp::PathWithdraw;
    body.model = flow.model;
    body.a = path.channel;
    m_ctx.fromController(makeControl(m_yni, path.source, fh, body));
    emit("PATH_WITHDRAW", {{"edge", path.source.toString()}, {"ch", std::to_string(path.channel)},
                           {"comm", flow.label()}});
    it = flow.advertised.erase(it);
  }

  for (auto& [key, path] : desired) {
    auto it = flow.advertised.find(key);
    if (it != flow.advertised.end() && it->second == path)
      continue;
    FloatingHeader fh;
    fh.valleyId = flow.valley;
    fh.channelId = path.channel;
    ControlBody body;
    body.op = ControlOp::PathAdvertise;
    body.model = flow.model;
    body.a = path.channel;
    body.tree = path.tree;
    m_ctx.fromController(makeControl(m_yni, path.source, fh, body));
    bool fromPrecomputed = false;
    auto pre = flow.precomputed.find(key.second);
    if (pre != flow.precomputed.end()) {
      fromPrecomputed = pre->second.tree == path.tree;
      flow.precomputed.erase(pre);
    }
    emit("PATH_ADV", {{"edge", path.source.toString()}, {"ch", std::to_string(path.channel)},
                      {"comm", flow.label()}, {"nodes", std::to_string(path.tree.nodeCount())},
                      {"precomputed", fromPrecomputed ? "1" : "0"}});
    flow.advertised[key] = path;
  }

  // proactive paths for on-hold producer edges of unpartitioned single-source flows
  if (isSingleSource(flow.model) && !flow.isPartitioned()) {
    for (const auto& [edge, active] : flow.producerEdges) {
      if (active)
        continue;
      auto targets = pathTargets(flow, flow.flowChannel, edge);
      if (targets.empty()) {
        flow.precomputed.erase(edge);
        continue;
      }
      auto result = shortestPathTree(m_graph, edge, targets);
      PathObject path{edge, std::move(result.tree), flow.flowChannel, flow.valley};
      auto it = flow.precomputed.find(edge);
      if (it != flow.precomputed.end() && it->second == path)
        continue;
      emit("PATH_PRECOMPUTE", {{"edge", edge.toString()}, {"ch", std::to_string(flow.flowChannel)},
                               {"comm", flow.label()}, {"nodes", std::to_string(path.tree.nodeCount())}});
      flow.precomputed[edge] = std::move(path);
    }
  }
}

void
Controller::recomputeAll()
{
  for (auto& [key, flow] : m_flows)
    recompute(flow);
}

void
Controller::receive(const YodelMessage& msg)
{
  ControlBody body;
  try {
    body = ControlBody::decode(msg.data);
  }
  catch (const CodecError& e) {
    emit("ERROR", {{"from", msg.fixed.sender.toString()}, {"reason", e.what()}});
    return;
  }
  const auto& fh = msg.floating;
  const Yni& from = msg.fixed.sender;

  switch (body.op) {
  case ControlOp::ControllerJoin:
    if (!fh.valleyId || !fh.namespaceId) {
      emit("ERROR", {{"from", from.toString()}, {"reason", "join without valley or namespace"}});
      return;
    }
    try {
      handleEdgeJoin(*fh.valleyId, *fh.namespaceId, body.text, from, body.role);
    }
    catch (const std::exception& e) {
      emit("ERROR", {{"from", from.toString()}, {"reason", e.what()}});
      FloatingHeader reply;
      reply.valleyId = *fh.valleyId;
      reply.namespaceId = *fh.namespaceId;
      ControlBody denied;
      denied.op = ControlOp::ControllerJoinReply;
      denied.role = body.role;
      denied.flags = control_flag::DENIED;
      denied.model = body.model;
      denied.text = body.text;
      m_ctx.fromController(makeControl(m_yni, from, reply, denied));
    }
    return;
  case ControlOp::RemoveRole:
    if (!fh.valleyId || !fh.namespaceId) {
      emit("ERROR", {{"from", from.toString()}, {"reason", "remove-role without valley or namespace"}});
      return;
    }
    try {
      removeEdgeRole(*fh.valleyId, *fh.namespaceId, body.text, from, body.role);
    }
    catch (const ControllerError& e) {
      emit("ROLE_UNKNOWN", {{"edge", from.toString()}, {"role", roleKey(body.role)}});
    }
    return;
  case ControlOp::NeighborReport:
    if (!m_graph.hasNode(from)) {
      emit("ERROR", {{"from", from.toString()}, {"reason", "neighbor report from unregistered node"}});
      return;
    }
    {
      const auto& info = m_graph.node(from);
      emit("TOPOLOGY", {{"from", from.toString()}, {"neighbors", std::to_string(body.neighbors.size())}});
      registerInfrastructureNode(from, info.role, info.domain, body.neighbors, info.stats);
    }
    return;
  default:
    emit("ERROR", {{"from", from.toString()}, {"reason", "unexpected " + toString(body.op)}});
    return;
  }
}

void
Controller::emit(const std::string& event, std::vector<std::pair<std::string, std::string>> fields)
{
  m_ctx.trace({m_ctx.now(), event, m_yni.toString(), std::move(fields)});
}

} // namespace yodel

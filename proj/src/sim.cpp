#include "yodel/sim.hpp"

#include <json.hpp>

#include <algorithm>

namespace yodel {

std::uint64_t
EventQueue::push(Tick tick, EventPayload payload)
{
  auto seq = m_nextSeq++;
  m_events.emplace(std::make_pair(tick, seq), std::move(payload));
  return seq;
}

Event
EventQueue::pop()
{
  auto node = m_events.extract(m_events.begin());
  return {node.key().first, node.key().second, std::move(node.mapped())};
}

namespace {

std::string
joinNames(const std::vector<std::string>& names)
{
  std::string out;
  for (const auto& n : names) {
    if (!out.empty())
      out += ',';
    out += n;
  }
  return out;
}

bool
isTwinSync(const YodelMessage& msg)
{
  if (msg.fixed.kind != MessageKind::ControlYpp)
    return false;
  try {
    auto op = ControlBody::decode(msg.data).op;
    return op == ControlOp::TwinQuery || op == ControlOp::TwinResponse;
  }
  catch (const CodecError&) {
    return false;
  }
}

} // namespace

Simulation::Simulation(const TopologySpec& topology, const ScenarioSpec& scenario, SimConfig config)
  : m_config(std::move(config))
{
  std::vector<const ScenarioCommand*> later;
  for (const auto& cmd : scenario.commands) {
    if (cmd.tick == 0 && cmd.verb() == "set") {
      auto args = cmd.args();
      if (auto err = m_config.set(args[0], args[1]))
        note("CMD_ERROR", {{"line", std::to_string(cmd.line)}, {"cmd", cmd.text()}, {"reason", *err}});
      continue;
    }
    later.push_back(&cmd);
  }
  build(topology);
  for (const auto* cmd : later)
    m_queue.push(cmd->tick, CommandEvent{*cmd});
  ensureSync();
}

Simulation::~Simulation() = default;

void
Simulation::ensureSync()
{
  if (m_syncScheduled || m_config.twinSyncPeriod == 0)
    return;
  m_syncScheduled = true;
  m_queue.push(m_now + m_config.twinSyncPeriod, SyncTick{});
}

void
Simulation::note(const std::string& event, std::vector<std::pair<std::string, std::string>> fields)
{
  trace({m_now, event, "sim", std::move(fields)});
}

void
Simulation::build(const TopologySpec& topology)
{
  auto makeYni = [&] (const std::string& name, const std::optional<MacAddress>& mac) {
    Yni yni = mac ? Yni(*mac, m_config.epoch)
                  : Yni::generate(SeededRandomMac{hashString(0, name)}, m_config.epoch);
    if (m_names.count(yni) > 0)
      throw std::runtime_error("YNI collision between '" + name + "' and '" + m_names.at(yni) + "'");
    m_names[yni] = name;
    m_byName[name] = yni;
    return yni;
  };

  Yni controllerYni = makeYni("controller", std::nullopt);
  m_controller = std::make_unique<Controller>(controllerYni, *this);
  trace({0, "NODE", controllerYni.toString(), {{"name", "controller"}, {"role", "controller"}}});

  for (const auto& decl : topology.nodes) {
    Yni yni = makeYni(decl.name, decl.mac);
    m_domains[yni] = decl.domain;
    auto rng = Rng::fork(m_config.seed, yni);
    if (decl.role == NodeRole::Edge)
      m_nodes[yni] = std::make_unique<Edge>(yni, decl.name, *this, rng);
    else
      m_nodes[yni] = std::make_unique<Connector>(yni, decl.name, *this, rng);
    trace({0, "NODE", yni.toString(), {{"name", decl.name}, {"role", toString(decl.role)}, {"domain", decl.domain}}});
  }

  for (const auto& l : topology.links) {
    Yni a = m_byName.at(l.a);
    Yni b = m_byName.at(l.b);
    m_links[makeLinkKey(a, b)] = {l.latency, true};
    m_nodes.at(a)->addInfraNeighbor(b, l.latency);
    m_nodes.at(b)->addInfraNeighbor(a, l.latency);
  }

  for (const auto& g : topology.groups) {
    for (const auto& member : g.members) {
      Yni m = m_byName.at(member);
      std::set<Yni> covers;
      Tick latency = 0;
      for (const auto& other : g.members) {
        Yni o = m_byName.at(other);
        auto link = m_links.find(makeLinkKey(m, o));
        if (o == m || link == m_links.end())
          continue;
        covers.insert(o);
        latency = std::max(latency, link->second.latency);
      }
      if (covers.size() >= 2)
        m_nodes.at(m)->act().addMulticast(covers, latency, "mcast:" + g.domain);
    }
  }

  for (const auto& decl : topology.nodes) {
    Yni yni = m_byName.at(decl.name);
    std::vector<NeighborEntry> neighbors;
    for (const auto& [key, link] : m_links) {
      if (key.first == yni)
        neighbors.push_back({key.second, static_cast<std::uint32_t>(link.latency)});
      else if (key.second == yni)
        neighbors.push_back({key.first, static_cast<std::uint32_t>(link.latency)});
    }
    m_controller->registerInfrastructureNode(yni, decl.role, decl.domain, neighbors, decl.stats);
  }

  for (const auto& decl : topology.hosts) {
    UserId user{decl.user};
    if (!m_controller->hasUser(user))
      m_controller->registerUser(user);
    Yni yni = makeYni(decl.name, decl.mac);
    auto host = std::make_unique<Host>(yni, decl.name, user, *this, Rng::fork(m_config.seed, yni));
    Host& h = *host;
    m_nodes[yni] = std::move(host);

    std::optional<Yni> edgeYni;
    if (decl.edge) {
      edgeYni = m_byName.at(*decl.edge);
    }
    else {
      try {
        edgeYni = m_controller->provisionHost(user, decl.intent);
      }
      catch (const ControllerError& e) {
        trace({0, "NODE", yni.toString(), {{"name", decl.name}, {"role", "host"}, {"domain", "-"}}});
        note("PROVISION_FAILED", {{"host", decl.name}, {"reason", e.what()}});
        continue;
      }
    }
    m_domains[yni] = m_domains.at(*edgeYni);
    trace({0, "NODE", yni.toString(), {{"name", decl.name}, {"role", "host"}, {"domain", m_domains[yni]},
                                       {"edge", nameOf(*edgeYni)}}});
    Tick latency = m_config.hostLinkLatency;
    m_links[makeLinkKey(yni, *edgeYni)] = {latency, true};
    h.attach(*edgeYni, latency);
    static_cast<Edge&>(*m_nodes.at(*edgeYni)).attachHost(yni, latency);
    m_controller->noteHostAttached(*edgeYni);
  }
}

Node*
Simulation::node(const std::string& name)
{
  auto it = m_byName.find(name);
  if (it == m_byName.end())
    return nullptr;
  auto n = m_nodes.find(it->second);
  return n == m_nodes.end() ? nullptr : n->second.get();
}

Host*
Simulation::host(const std::string& name)
{
  auto* n = node(name);
  return n && n->kind() == NodeKind::Host ? static_cast<Host*>(n) : nullptr;
}

Edge*
Simulation::edge(const std::string& name)
{
  auto* n = node(name);
  return n && n->kind() == NodeKind::Edge ? static_cast<Edge*>(n) : nullptr;
}

Yni
Simulation::yniOf(const std::string& name) const
{
  auto it = m_byName.find(name);
  if (it == m_byName.end())
    throw std::out_of_range("unknown node '" + name + "'");
  return it->second;
}

std::string
Simulation::nameOf(const Yni& yni) const
{
  auto it = m_names.find(yni);
  return it == m_names.end() ? yni.toString() : it->second;
}

std::string
Simulation::domainOf(const Yni& yni) const
{
  auto it = m_domains.find(yni);
  return it == m_domains.end() ? std::string("-") : it->second;
}

void
Simulation::trace(TraceRecord record)
{
  if (record.event == "ERROR" || record.event == "ROOT_MISMATCH")
    m_metrics.protocolErrors++;
  m_trace.add(std::move(record));
}

void
Simulation::transmit(const Yni& from, const Strategy& strategy, std::vector<YodelMessage> messages)
{
  if (messages.empty())
    return;
  const std::string fromDomain = domainOf(from);
  bool intra = true;
  for (const auto& m : messages)
    intra = intra && domainOf(m.fixed.receiver) == fromDomain;
  std::string key = intra ? "domain:" + fromDomain
                          : "inter:" + fromDomain + "->" + domainOf(messages.front().fixed.receiver);
  m_metrics.transmissions[key]++;
  const char* via = strategy.kind == Strategy::Kind::LocalMulticast ? "mcast" : "unicast";

  for (auto& msg : messages) {
    const Yni to = msg.fixed.receiver;
    Bytes bytes;
    try {
      bytes = encode(msg);
    }
    catch (const CodecError& e) {
      trace({m_now, "ERROR", from.toString(), {{"to", to.toString()}, {"reason", e.what()}}});
      continue;
    }
    auto lk = makeLinkKey(from, to);
    auto link = m_links.find(lk);
    if (link == m_links.end()) {
      trace({m_now, "ERROR", from.toString(), {{"to", to.toString()}, {"reason", "no link"}}});
      continue;
    }
    auto& counters = m_metrics.links[lk];
    counters.sends++;
    LinkArrival arrival{from, to, std::move(bytes), describeMessage(msg), isDataKind(msg.fixed.kind),
                        isTwinSync(msg)};
    if (!arrival.quiet) {
      auto fields = arrival.fields;
      fields.insert(fields.begin(), {{"to", to.toString()}, {"via", via}});
      trace({m_now, "SEND", from.toString(), std::move(fields)});
    }
    if (!link->second.up) {
      counters.lost++;
      if (arrival.data) {
        auto fields = arrival.fields;
        fields.insert(fields.begin(), {"to", to.toString()});
        fields.push_back({"reason", "link-down"});
        trace({m_now, "LOST", from.toString(), std::move(fields)});
      }
      continue;
    }
    m_queue.push(m_now + link->second.latency, std::move(arrival));
  }
}

void
Simulation::toController(const YodelMessage& msg)
{
  m_metrics.controllerMessages++;
  m_queue.push(m_now + m_config.controllerLatency, ControllerArrival{msg});
}

void
Simulation::fromController(const YodelMessage& msg)
{
  m_metrics.controllerMessages++;
  try {
    m_queue.push(m_now + m_config.controllerLatency, ControllerDelivery{msg.fixed.receiver, encode(msg)});
  }
  catch (const CodecError& e) {
    trace({m_now, "ERROR", m_controller->yni().toString(), {{"reason", e.what()}}});
  }
}

void
Simulation::schedule(Tick tick, const std::string& command)
{
  m_queue.push(std::max(tick, m_now), CommandEvent{ScenarioSpec::parseCommand(tick, command)});
}

void
Simulation::runUntil(Tick until)
{
  while (!m_queue.empty() && m_queue.nextTick() <= until)
    execute(m_queue.pop());
  m_now = std::max(m_now, until);
}

void
Simulation::execute(Event event)
{
  m_now = event.tick;
  if (auto* a = std::get_if<LinkArrival>(&event.payload)) {
    auto lk = makeLinkKey(a->from, a->to);
    auto& counters = m_metrics.links[lk];
    auto target = m_nodes.find(a->to);
    bool up = m_links.at(lk).up;
    if (!up || target == m_nodes.end() || !target->second->alive()) {
      counters.lost++;
      if (a->data) {
        auto fields = a->fields;
        fields.insert(fields.begin(), {"from", a->from.toString()});
        fields.push_back({"reason", up ? "node-down" : "link-down"});
        trace({m_now, "LOST", a->to.toString(), std::move(fields)});
      }
      return;
    }
    counters.receives++;
    if (!a->quiet) {
      auto fields = a->fields;
      fields.insert(fields.begin(), {"from", a->from.toString()});
      trace({m_now, "RECV", a->to.toString(), std::move(fields)});
    }
    target->second->receive(a->from, a->bytes);
  }
  else if (auto* c = std::get_if<ControllerArrival>(&event.payload)) {
    m_controller->receive(c->msg);
  }
  else if (auto* d = std::get_if<ControllerDelivery>(&event.payload)) {
    auto target = m_nodes.find(d->to);
    if (target != m_nodes.end() && target->second->alive())
      target->second->receive(m_controller->yni(), d->bytes);
  }
  else if (std::holds_alternative<SyncTick>(event.payload)) {
    m_syncScheduled = false;
    for (auto& [yni, n] : m_nodes) {
      if (n->kind() == NodeKind::Edge && n->alive())
        static_cast<Edge&>(*n).syncTick();
    }
    ensureSync();
  }
  else if (auto* cmd = std::get_if<CommandEvent>(&event.payload)) {
    try {
      runCommand(cmd->command);
    }
    catch (const std::exception& e) {
      note("CMD_ERROR", {{"line", std::to_string(cmd->command.line)}, {"cmd", cmd->command.text()},
                         {"reason", e.what()}});
    }
  }
}

ValleyNumber
Simulation::valleyNumber(const std::string& name) const
{
  auto v = m_controller->registry().findValley(name);
  if (!v)
    throw std::invalid_argument("unknown valley '" + name + "'");
  return v->id;
}

NamespaceNumber
Simulation::namespaceNumber(ValleyNumber valley, const std::string& name) const
{
  const auto* rec = m_controller->registry().vib(valley).findNamespace(name);
  if (!rec)
    throw std::invalid_argument("unknown namespace '" + name + "'");
  return rec->id;
}

Host&
Simulation::hostRef(const std::string& name)
{
  auto* h = host(name);
  if (!h)
    throw std::invalid_argument("unknown host '" + name + "'");
  return *h;
}

void
Simulation::runCommand(const ScenarioCommand& cmd)
{
  const auto& verb = cmd.verb();
  auto args = cmd.args();
  auto& registry = m_controller->registry();
  auto ensureUser = [&] (const std::string& u) {
    if (!m_controller->hasUser(UserId{u}))
      m_controller->registerUser(UserId{u});
    return UserId{u};
  };

  if (verb == "set") {
    if (auto err = m_config.set(args[0], args[1]))
      throw std::invalid_argument(*err);
    ensureSync();
  }
  else if (verb == "valley") {
    auto v = registry.createValley(ensureUser(args[1]), args[0]);
    note("VALLEY", {{"name", args[0]}, {"id", std::to_string(v.id)}});
  }
  else if (verb == "member") {
    auto v = valleyNumber(args[0]);
    registry.addMember(registry.valleyAdmin(v), v, ensureUser(args[1]));
  }
  else if (verb == "namespace") {
    auto v = valleyNumber(args[0]);
    auto model = *parseServiceModel(args[2]);
    Visibility visibility = Visibility::Open;
    AnycastMode anycast = AnycastMode::dedicated();
    for (std::size_t i = 3; i < args.size(); ++i) {
      if (args[i] == "protected")
        visibility = Visibility::Protected;
      else if (args[i] == "randomized")
        anycast = AnycastMode::randomized(m_config.pDeliver);
    }
    auto admin = cmd.option("admin") ? UserId{*cmd.option("admin")} : registry.valleyAdmin(v);
    const auto& rec = registry.createNamespace(admin, v, args[1], visibility, model, anycast);
    note("NAMESPACE", {{"valley", args[0]}, {"name", args[1]}, {"id", std::to_string(rec.id)},
                       {"model", std::string(toString(model))}});
  }
  else if (verb == "grant") {
    auto v = valleyNumber(args[0]);
    const auto* rec = registry.vib(v).findNamespace(args[1]);
    if (!rec)
      throw std::invalid_argument("unknown namespace '" + args[1] + "'");
    registry.grantAccess(rec->admin, v, args[1], UserId{args[2]});
  }
  else if (verb == "visibility") {
    auto v = valleyNumber(args[0]);
    const auto* rec = registry.vib(v).findNamespace(args[1]);
    if (!rec)
      throw std::invalid_argument("unknown namespace '" + args[1] + "'");
    registry.setVisibility(rec->admin, v, args[1], args[2] == "protected" ? Visibility::Protected : Visibility::Open);
  }
  else if (verb == "community") {
    registry.ensureCommunity(valleyNumber(args[0]), args[1], args[2]);
  }
  else if (verb == "join") {
    auto& h = hostRef(args[0]);
    AccessGrant grant;
    try {
      grant = m_controller->resolveAccess(h.user(), args[2], args[3]);
    }
    catch (const ControllerError& e) {
      trace({m_now, "AUTH_DENIED", h.yni().toString(), {{"app", args[1]}, {"valley", args[2]}, {"ns", args[3]},
                                                         {"reason", e.what()}}});
      return;
    }
    std::optional<Tick> ttl;
    if (auto t = cmd.option("ttl"))
      ttl = std::stoull(*t);
    h.join(args[1], grant, args[4], *parseRole(args[5]), ttl);
  }
  else if (verb == "leave") {
    auto& h = hostRef(args[0]);
    auto v = valleyNumber(args[2]);
    h.leave(args[1], v, namespaceNumber(v, args[3]), args[4], *parseRole(args[5]));
  }
  else if (verb == "send") {
    auto& h = hostRef(args[0]);
    auto v = valleyNumber(args[2]);
    auto ns = namespaceNumber(v, args[3]);
    std::uint64_t count = cmd.option("count") ? std::stoull(*cmd.option("count")) : 1;
    Tick every = cmd.option("every") ? std::stoull(*cmd.option("every")) : 1;
    std::string payload = cmd.option("payload").value_or("");
    if (count == 0)
      return;
    h.send(args[1], v, ns, args[4], payload);
    if (count > 1) {
      ScenarioCommand next = cmd;
      next.tick = m_now + every;
      std::erase_if(next.words, [] (const std::string& w) { return w.rfind("count=", 0) == 0; });
      next.words.push_back("count=" + std::to_string(count - 1));
      m_queue.push(next.tick, CommandEvent{std::move(next)});
    }
  }
  else if (verb == "lock" || verb == "unlock") {
    auto& h = hostRef(args[0]);
    auto v = valleyNumber(args[2]);
    h.setConsumerLock(args[1], v, namespaceNumber(v, args[3]), args[4], verb == "lock");
  }
  else if (verb == "fault") {
    const auto& kind = args[0];
    std::vector<std::string> targets(args.begin() + 1, args.end());
    note("FAULT", {{"kind", kind}, {"target", joinNames(targets)}});
    if (kind == "link-down" || kind == "link-up") {
      setLink(yniOf(targets[0]), yniOf(targets[1]), kind == "link-up");
    }
    else if (kind == "host-disconnect" || kind == "host-reconnect") {
      auto& h = hostRef(targets[0]);
      if (!h.edge())
        throw std::invalid_argument("host '" + targets[0] + "' has no edge");
      bool up = kind == "host-reconnect";
      m_links.at(makeLinkKey(h.yni(), *h.edge())).up = up;
      if (h.alive())
        h.linkChanged(*h.edge(), up);
    }
    else {
      crashNode(yniOf(targets[0]));
    }
  }
  else if (verb == "partition-now") {
    auto v = valleyNumber(args[0]);
    m_controller->repartition(v, namespaceNumber(v, args[1]), args[2]);
  }
  else if (verb == "report") {
    std::uint64_t deliveries = 0;
    std::uint64_t drops = 0;
    for (const auto& [n, c] : m_metrics.deliveries)
      deliveries += c;
    for (const auto& [n, c] : m_metrics.drops)
      drops += c;
    note("REPORT", {{"deliveries", std::to_string(deliveries)}, {"drops", std::to_string(drops)},
                    {"controller_messages", std::to_string(m_metrics.controllerMessages)},
                    {"protocol_errors", std::to_string(m_metrics.protocolErrors)}});
  }
}

void
Simulation::setLink(const Yni& a, const Yni& b, bool up)
{
  auto& link = m_links.at(makeLinkKey(a, b));
  if (link.up == up)
    return;
  link.up = up;
  for (auto [self, other] : {std::pair{a, b}, std::pair{b, a}}) {
    auto& n = *m_nodes.at(self);
    if (n.alive())
      n.linkChanged(other, up);
  }
}

void
Simulation::crashNode(const Yni& yni)
{
  auto& n = *m_nodes.at(yni);
  if (!n.alive())
    return;
  n.crash();
  if (n.kind() == NodeKind::Host) {
    auto& h = static_cast<Host&>(n);
    if (h.edge()) {
      m_links.at(makeLinkKey(yni, *h.edge())).up = false;
      auto& e = static_cast<Edge&>(*m_nodes.at(*h.edge()));
      if (e.alive())
        e.hostCrashed(yni);
    }
    return;
  }
  for (auto& [key, link] : m_links) {
    if (key.first != yni && key.second != yni)
      continue;
    if (!link.up)
      continue;
    link.up = false;
    const Yni& other = key.first == yni ? key.second : key.first;
    auto& o = *m_nodes.at(other);
    if (o.alive())
      o.linkChanged(yni, false);
  }
}

std::vector<std::string>
Simulation::conservationViolations() const
{
  std::map<LinkKey, std::uint64_t> inFlight;
  m_queue.forEach([&] (Tick, const EventPayload& payload) {
    if (const auto* a = std::get_if<LinkArrival>(&payload))
      inFlight[makeLinkKey(a->from, a->to)]++;
  });
  std::vector<std::string> out;
  for (const auto& [key, c] : m_metrics.links) {
    auto pending = inFlight.count(key) ? inFlight.at(key) : 0;
    if (c.sends != c.receives + pending + c.lost) {
      out.push_back(nameOf(key.first) + "-" + nameOf(key.second) + ": sends=" + std::to_string(c.sends) +
                    " receives=" + std::to_string(c.receives) + " in_flight=" + std::to_string(pending) +
                    " lost=" + std::to_string(c.lost));
    }
  }
  return out;
}

std::string
Simulation::metricsJson() const
{
  using nlohmann::json;
  json j;
  j["tick"] = m_now;
  j["seed"] = m_config.seed;
  json links = json::array();
  for (const auto& [key, c] : m_metrics.links) {
    links.push_back({{"a", nameOf(key.first)}, {"b", nameOf(key.second)}, {"sends", c.sends},
                     {"receives", c.receives}, {"lost", c.lost}});
  }
  j["links"] = links;
  j["transmissions"] = m_metrics.transmissions;
  auto named = [&] (const std::map<Yni, std::uint64_t>& m) {
    json out = json::object();
    for (const auto& [yni, v] : m)
      out[nameOf(yni)] = v;
    return out;
  };
  j["deliveries"] = named(m_metrics.deliveries);
  j["drops"] = named(m_metrics.drops);
  j["buffer_peaks"] = named(m_metrics.bufferPeaks);
  json visits = json::object();
  for (const auto& [key, v] : m_metrics.controllerVisits) {
    auto bar = key.find('|');
    std::string label = key;
    try {
      label = nameOf(Yni::parse(key.substr(0, bar))) + key.substr(bar);
    }
    catch (const std::exception&) {
    }
    visits[label] = v;
  }
  j["controller_visits"] = visits;
  j["controller_messages"] = m_metrics.controllerMessages;
  json hist = json::object();
  for (const auto& [lat, n] : m_metrics.latencyHistogram)
    hist[std::to_string(lat)] = n;
  j["latency_histogram"] = hist;
  j["protocol_errors"] = m_metrics.protocolErrors;
  j["conservation_violations"] = conservationViolations();
  return j.dump(2) + "\n";
}

RunResult
runScenario(const TopologySpec& topology, const ScenarioSpec& scenario, const SimConfig& config, Tick until)
{
  Simulation sim(topology, scenario, config);
  sim.runUntil(until);
  return {sim.traceLog().text(), sim.metricsJson(), sim.metrics().protocolErrors, sim.conservationViolations()};
}

} // namespace yodel

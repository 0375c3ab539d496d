#include "support/conformance.hpp"
#include "support/generators.hpp"
#include "support/trace-checks.hpp"
#include "support/twin-run.hpp"
#include "support/world.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <queue>
#include <sstream>

using namespace yodel;
using namespace yodel::test;

namespace {

struct Verdict
{
  bool pass = true;
  std::string detail;
  std::vector<std::string> problems;

  void
  require(bool ok, const std::string& what)
  {
    if (!ok) {
      pass = false;
      if (problems.size() < 5)
        problems.push_back(what);
    }
  }
};

/// Every run of every criterion, for the trace-wide checks.
struct RunLog
{
  std::string label;
  Trace trace;
};

std::vector<RunLog> g_runs;
/// labels of runs whose repeat produced a different trace
std::vector<std::string> g_nondeterministic;
std::size_t g_repeats = 0;

void
record(const std::string& label, const Trace& first, const Trace& second)
{
  ++g_repeats;
  if (first.text() != second.text())
    g_nondeterministic.push_back(label);
  g_runs.push_back({label, first});
}

std::string
sample(const std::string& name)
{
  std::ifstream in(std::string(YODEL_SAMPLES) + "/" + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string>
namesByLabel(const Trace& trace)
{
  std::map<std::string, std::string> out;
  for (const auto& r : trace.records()) {
    if (r.event == "NODE")
      out[r.node] = traceField(r, "name");
  }
  return out;
}

std::string
originOf(const std::string& msgId)
{
  return msgId.substr(0, msgId.find('.'));
}

// ---------------------------------------------------------------------------
// criterion 1

struct Community
{
  std::vector<int> producers;
  std::vector<int> consumers;
};

struct WorldSpec
{
  std::vector<bool> isEdge;
  std::vector<int> domain;
  std::vector<std::tuple<int, int, int>> links;
  std::vector<std::vector<int>> groups;
  /// host -> node index
  std::vector<int> hostEdge;
  std::vector<Community> communities;
  int sends = 2;
};

std::string
topologyText(const WorldSpec& w)
{
  std::ostringstream os;
  std::set<int> domains(w.domain.begin(), w.domain.end());
  for (int d : domains)
    os << "domain d" << d << "\n";
  for (std::size_t i = 0; i < w.isEdge.size(); ++i)
    os << "node n" << i << (w.isEdge[i] ? " edge" : " connector") << " d" << w.domain[i] << "\n";
  for (const auto& [a, b, lat] : w.links)
    os << "link n" << a << " n" << b << " " << lat << "\n";
  for (const auto& g : w.groups) {
    os << "mcastgroup d" << w.domain[g.front()];
    for (int m : g)
      os << " n" << m;
    os << "\n";
  }
  for (std::size_t h = 0; h < w.hostEdge.size(); ++h)
    os << "host h" << h << " u edge=n" << w.hostEdge[h] << "\n";
  return os.str();
}

constexpr Tick SEND_START = 150;

std::string
scenarioText(const WorldSpec& w)
{
  std::ostringstream os;
  os << "at 0 valley v u\nat 0 namespace v ns MSM\n";
  Tick t = 2;
  for (std::size_t c = 0; c < w.communities.size(); ++c) {
    for (int p : w.communities[c].producers)
      os << "at " << t++ << " join h" << p << " p" << c << " v ns room" << c << " producer\n";
    for (int h : w.communities[c].consumers)
      os << "at " << t++ << " join h" << h << " c" << c << " v ns room" << c << " consumer\n";
  }
  t = SEND_START;
  for (std::size_t c = 0; c < w.communities.size(); ++c) {
    for (int p : w.communities[c].producers) {
      os << "at " << t << " send h" << p << " p" << c << " v ns room" << c << " count=" << w.sends
         << " every=3\n";
      t += 7;
    }
  }
  return os.str();
}

using Delivery = std::tuple<std::string, std::string, std::string>;

/**
 * Independent delivery oracle: every published message reaches each consumer
 * app of its community whose edge is reachable from the producer's edge over
 * the declared links, once.
 */
std::multiset<Delivery>
floodOracle(const WorldSpec& w, const std::vector<Delivery>& published)
{
  const std::size_t n = w.isEdge.size();
  std::vector<std::vector<int>> adj(n);
  for (const auto& [a, b, lat] : w.links) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  auto reach = [&] (int from) {
    std::vector<bool> seen(n, false);
    std::queue<int> q;
    q.push(from);
    seen[from] = true;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int v : adj[u]) {
        if (!seen[v]) {
          seen[v] = true;
          q.push(v);
        }
      }
    }
    return seen;
  };

  std::multiset<Delivery> out;
  for (const auto& [host, app, id] : published) {
    int p = std::stoi(host.substr(1));
    int c = std::stoi(app.substr(1));
    auto seen = reach(w.hostEdge[p]);
    for (int h : w.communities[c].consumers) {
      if (seen[w.hostEdge[h]])
        out.insert({"h" + std::to_string(h), "c" + std::to_string(c), id});
    }
  }
  return out;
}

/// Hosts on the edges plus up to three communities drawn from @p gen.
void
populate(WorldSpec& w, std::mt19937_64& gen, std::size_t maxHostsPerEdge)
{
  for (std::size_t i = 0; i < w.isEdge.size(); ++i) {
    if (!w.isEdge[i])
      continue;
    std::size_t hosts = 1 + gen() % maxHostsPerEdge;
    for (std::size_t k = 0; k < hosts; ++k)
      w.hostEdge.push_back(static_cast<int>(i));
  }
  const int hostCount = static_cast<int>(w.hostEdge.size());
  std::size_t communities = 1 + gen() % 3;
  for (std::size_t c = 0; c < communities; ++c) {
    Community com;
    std::size_t producers = 1 + gen() % 2;
    std::set<int> chosen;
    for (std::size_t k = 0; k < producers; ++k)
      chosen.insert(static_cast<int>(gen() % hostCount));
    com.producers.assign(chosen.begin(), chosen.end());
    for (int h = 0; h < hostCount; ++h) {
      if (gen() % 2)
        com.consumers.push_back(h);
    }
    w.communities.push_back(std::move(com));
  }
}

WorldSpec
randomWorld(std::uint64_t seed)
{
  std::mt19937_64 gen(seed);
  WorldSpec w;
  std::size_t n = 2 + gen() % 7;
  for (std::size_t i = 0; i < n; ++i) {
    w.isEdge.push_back(gen() % 5 < 3);
    w.domain.push_back(static_cast<int>(gen() % 2));
  }
  w.isEdge[gen() % n] = true;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (gen() % 100 < 40)
        w.links.emplace_back(static_cast<int>(a), static_cast<int>(b), static_cast<int>(1 + gen() % 3));
    }
  }
  for (int d = 0; d < 2; ++d) {
    std::vector<int> members;
    for (std::size_t i = 0; i < n; ++i) {
      if (w.domain[i] == d && gen() % 2)
        members.push_back(static_cast<int>(i));
    }
    if (members.size() >= 2 && gen() % 2)
      w.groups.push_back(members);
  }
  populate(w, gen, 2);
  return w;
}

/// All labelled graphs on @p n nodes with every non-empty edge-role mask.
std::vector<WorldSpec>
smallWorlds(std::size_t n)
{
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b)
      pairs.emplace_back(static_cast<int>(a), static_cast<int>(b));
  }
  std::vector<WorldSpec> out;
  for (std::uint32_t graph = 0; graph < (1u << pairs.size()); ++graph) {
    for (std::uint32_t roles = 1; roles < (1u << n); ++roles) {
      WorldSpec w;
      for (std::size_t i = 0; i < n; ++i) {
        w.isEdge.push_back((roles >> i) & 1);
        w.domain.push_back(0);
      }
      for (std::size_t k = 0; k < pairs.size(); ++k) {
        if ((graph >> k) & 1)
          w.links.emplace_back(pairs[k].first, pairs[k].second, 1);
      }
      std::mt19937_64 gen(graph * 131 + roles * 7 + n);
      populate(w, gen, 1);
      out.push_back(std::move(w));
    }
  }
  return out;
}

Verdict
floodEquivalence()
{
  Verdict v;
  auto start = std::chrono::steady_clock::now();
  std::vector<std::pair<std::string, WorldSpec>> worlds;
  for (std::size_t n = 2; n <= 4; ++n) {
    auto small = smallWorlds(n);
    for (std::size_t i = 0; i < small.size(); ++i)
      worlds.emplace_back("small-" + std::to_string(n) + "-" + std::to_string(i), std::move(small[i]));
  }
  std::size_t exhaustive = worlds.size();
  for (std::uint64_t seed = 1; seed <= 100; ++seed)
    worlds.emplace_back("random-" + std::to_string(seed), randomWorld(seed));

  std::size_t expectedTotal = 0;
  for (const auto& [label, w] : worlds) {
    auto topo = TopologySpec::parse(topologyText(w));
    auto scn = ScenarioSpec::parse(scenarioText(w));
    SimConfig cfg;
    cfg.seed = 1;
    Tick until = SEND_START + 7 * 6 + 100;
    Simulation a(topo, scn, cfg);
    a.runUntil(until);
    Simulation b(topo, scn, cfg);
    b.runUntil(until);
    record("flood/" + label, a.traceLog(), b.traceLog());

    auto names = namesByLabel(a.traceLog());
    std::multiset<Delivery> actual;
    std::vector<Delivery> published;
    std::map<std::pair<std::string, std::string>, int> publishCount;
    for (const auto& r : a.traceLog().records()) {
      if (r.event == "DELIVER")
        actual.insert({names[r.node], traceField(r, "app"), traceField(r, "msg")});
      if (r.event == "PUBLISH") {
        published.push_back({names[r.node], traceField(r, "app"), traceField(r, "msg")});
        publishCount[{names[r.node], traceField(r, "app")}]++;
      }
    }
    std::size_t producerApps = 0;
    for (const auto& com : w.communities)
      producerApps += com.producers.size();
    v.require(publishCount.size() == producerApps, label + ": not every producer published");
    for (const auto& [key, n] : publishCount)
      v.require(n == w.sends, label + ": " + key.first + " published " + std::to_string(n));
    auto expected = floodOracle(w, published);
    expectedTotal += expected.size();
    std::set<Delivery> unique(actual.begin(), actual.end());
    v.require(unique.size() == actual.size(), label + ": duplicate delivery");
    if (actual != expected) {
      std::string diff;
      for (const auto& [h, app, msg] : actual) {
        if (expected.count({h, app, msg}) == 0) {
          diff = " extra " + h + "/" + app + "/" + msg;
          break;
        }
      }
      for (const auto& [h, app, msg] : expected) {
        if (diff.empty() && actual.count({h, app, msg}) == 0)
          diff = " missing " + h + "/" + app + "/" + msg;
      }
      v.require(false, label + ": delivered " + std::to_string(actual.size()) + ", oracle " +
                           std::to_string(expected.size()) + diff);
    }
    v.require(a.metrics().protocolErrors == 0, label + ": protocol errors");
  }
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  v.require(seconds < 60.0, "suite took " + std::to_string(seconds) + " s");
  std::ostringstream os;
  os << exhaustive << " enumerated + 100 random worlds, " << expectedTotal << " expected deliveries, "
     << static_cast<int>(seconds * 1000) << " ms";
  v.detail = os.str();
  return v;
}

// ---------------------------------------------------------------------------
// criterion 2

Verdict
serviceConformance()
{
  Verdict v;
  std::size_t ops = 0;
  std::size_t checkpoints = 0;
  for (auto model : ALL_SERVICE_MODELS) {
    for (std::uint64_t seed : {11u, 12u}) {
      auto a = runServiceSequence(model, seed, 500);
      auto b = runServiceSequence(model, seed, 500);
      record("table/" + std::string(toString(model)) + "/" + std::to_string(seed), a.trace, b.trace);
      ops += a.operations;
      checkpoints += a.checkpoints;
      v.require(a.operations >= 500, std::string(toString(model)) + ": too few operations");
      for (const auto& p : a.violations)
        v.require(false, std::string(toString(model)) + " " + p);
      v.require(a.protocolErrors == 0, std::string(toString(model)) + ": protocol errors");
    }
  }
  v.detail = "7 variants x 2 seeds, " + std::to_string(ops) + " operations, " + std::to_string(checkpoints) +
             " checkpoints";
  return v;
}

// ---------------------------------------------------------------------------
// criterion 3

const char* DENSE_SSM = R"(at 0 valley city alice
at 0 member city bob
at 0 namespace city video SSM
at 5 join cam1 feed city video lobby producer
at 5 join cam2 feed city video lobby producer
at 5 join cam3 feed city video lobby producer
at 6 join screen1 view city video lobby consumer
at 6 join screen2 view city video lobby consumer
at 40 send cam1 feed city video lobby count=20 every=1
at 40 send cam2 feed city video lobby count=60 every=1
at 40 send cam3 feed city video lobby count=60 every=1
at 50 fault node-crash cam1
)";

void
checkFailover(Verdict& v, const std::string& label, const std::string& scenario)
{
  auto topo = TopologySpec::parse(sample("ssm.topo"));
  auto scn = ScenarioSpec::parse(scenario);
  SimConfig cfg;
  cfg.seed = 1;
  Simulation sim(topo, scn, cfg);
  sim.runUntil(200);
  Simulation again(topo, scn, cfg);
  again.runUntil(200);
  record("failover/" + label, sim.traceLog(), again.traceLog());

  const auto& recs = sim.traceLog().records();
  auto names = namesByLabel(sim.traceLog());
  std::set<std::string> hostLabels;
  for (const auto& r : recs) {
    if (r.event == "NODE" && traceField(r, "role") == "host")
      hostLabels.insert(r.node);
  }

  std::size_t crashAt = recs.size();
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (recs[i].event == "FAULT") {
      crashAt = i;
      break;
    }
  }
  v.require(crashAt < recs.size(), label + ": no crash");
  if (crashAt == recs.size())
    return;
  const Tick crashTick = recs[crashAt].tick;

  std::vector<std::size_t> failovers;
  std::vector<std::size_t> hostUnlocks;
  for (std::size_t i = crashAt; i < recs.size(); ++i) {
    if (recs[i].event == "FAILOVER")
      failovers.push_back(i);
    if (recs[i].event == "UNLOCK" && hostLabels.count(recs[i].node) && traceField(recs[i], "role") == "producer")
      hostUnlocks.push_back(i);
  }
  v.require(failovers.size() == 1, label + ": " + std::to_string(failovers.size()) + " failovers");
  v.require(hostUnlocks.size() == 1, label + ": " + std::to_string(hostUnlocks.size()) + " producers activated");
  if (failovers.size() != 1 || hostUnlocks.size() != 1)
    return;

  const std::string newEdge = traceField(recs[failovers[0]], "to");
  const std::string successor = recs[hostUnlocks[0]].node;
  std::size_t advertised = recs.size();
  for (std::size_t i = failovers[0]; i < recs.size(); ++i) {
    if (recs[i].event == "PATH_ADV" && traceField(recs[i], "edge") == newEdge) {
      advertised = i;
      break;
    }
  }
  v.require(advertised < recs.size(), label + ": no path advertised for the new producer edge");
  if (advertised == recs.size())
    return;
  v.require(traceField(recs[advertised], "precomputed") == "1", label + ": path was not pre-computed");
  v.require(advertised < hostUnlocks[0], label + ": producer activated before its path");
  for (std::size_t i = crashAt; i < recs.size(); ++i) {
    if (recs[i].event == "PUBLISH" && recs[i].node == successor) {
      v.require(advertised < i, label + ": successor sent before the path was advertised");
      break;
    }
  }

  std::map<Tick, std::set<std::string>> origins;
  std::string successorName = names[successor];
  for (const auto& r : recs) {
    if (r.event != "DELIVER")
      continue;
    auto origin = originOf(traceField(r, "msg"));
    origins[r.tick].insert(origin);
    if (r.tick <= crashTick)
      v.require(origin == "cam1", label + ": " + origin + " delivered before the crash");
    else if (origin != "cam1")
      v.require(origin == successorName, label + ": " + origin + " delivered after failover");
  }
  for (const auto& [tick, set] : origins)
    v.require(set.size() == 1, label + ": two producers delivered at tick " + std::to_string(tick));
  v.require(!origins.empty(), label + ": nothing delivered");
  v.require(sim.metrics().protocolErrors == 0, label + ": protocol errors");
}

Verdict
ssmFailover()
{
  Verdict v;
  checkFailover(v, "sample", sample("ssm.scn"));
  checkFailover(v, "dense", DENSE_SSM);
  v.detail = "3 producers, active host crashed, sample and back-to-back send schedules";
  return v;
}

// ---------------------------------------------------------------------------
// criterion 4

Verdict
fanOut()
{
  Verdict v;
  auto scn = ScenarioSpec::parse(sample("fanout.scn"));
  std::uint64_t results[2] = {0, 0};
  std::uint64_t messages = 0;
  int i = 0;
  for (const auto* topo : {"fanout.topo", "fanout-mcast.topo"}) {
    auto spec = TopologySpec::parse(sample(topo));
    SimConfig cfg;
    cfg.seed = 1;
    Simulation sim(spec, scn, cfg);
    sim.runUntil(100);
    Simulation again(spec, scn, cfg);
    again.runUntil(100);
    record(std::string("fanout/") + topo, sim.traceLog(), again.traceLog());
    messages = sim.traceLog().count("PUBLISH");
    results[i++] = sim.metrics().domainTransmissions("transit");
    v.require(sim.traceLog().count("DELIVER") == 3 * messages, std::string(topo) + ": missing deliveries");
  }
  v.require(messages > 0, "no messages");
  v.require(results[0] == 3 * messages, "unicast: " + std::to_string(results[0]) + " transmissions");
  v.require(results[1] == 1 * messages, "multicast: " + std::to_string(results[1]) + " transmissions");
  v.detail = std::to_string(messages) + " messages; per message unicast " +
             std::to_string(messages ? results[0] / messages : 0) + ", multicast " +
             std::to_string(messages ? results[1] / messages : 0);
  return v;
}

// ---------------------------------------------------------------------------
// criterion 5

const char* CHAIN = R"(domain a
domain t
domain b
node e1 edge a
node c1 connector t
node e2 edge b
link e1 c1 1
link c1 e2 1
host p u edge=e1
host q u edge=e2
)";

std::pair<std::size_t, std::size_t>
connectorFootprint(std::size_t communities, Verdict& v)
{
  std::ostringstream scn;
  scn << "at 0 valley v u\nat 0 namespace v ns MSM\n";
  for (std::size_t c = 0; c < communities; ++c) {
    scn << "at 2 join p p" << c << " v ns room" << c << " producer\n";
    scn << "at 2 join q c" << c << " v ns room" << c << " consumer\n";
    scn << "at 50 send p p" << c << " v ns room" << c << "\n";
  }
  auto topo = TopologySpec::parse(CHAIN);
  auto spec = ScenarioSpec::parse(scn.str());
  SimConfig cfg;
  cfg.seed = 1;
  Simulation sim(topo, spec, cfg);
  sim.runUntil(100);
  Simulation again(topo, spec, cfg);
  again.runUntil(100);
  record("footprint/" + std::to_string(communities), sim.traceLog(), again.traceLog());
  v.require(sim.traceLog().count("DELIVER") == communities,
            std::to_string(communities) + " communities: " + std::to_string(sim.traceLog().count("DELIVER")) +
                " deliveries");
  const auto& act = sim.node("c1")->act();
  return {act.rowCount(), act.strategies().size()};
}

Verdict
segmentRouting()
{
  Verdict v;
  auto one = connectorFootprint(1, v);
  auto fifty = connectorFootprint(50, v);
  v.require(one == fifty, "connector table grew from " + std::to_string(one.first) + " to " +
                              std::to_string(fifty.first) + " rows");

  std::size_t connectorRuns = 0;
  std::size_t mismatches = 0;
  for (const auto& run : g_runs) {
    if (!connectorLabels(run.trace).empty())
      ++connectorRuns;
    for (const auto& rep : connectorRepeats(run.trace))
      v.require(false, run.label + ": connector repeat " + rep);
    bool faultFree = run.trace.count("FAULT") == 0;
    if (faultFree) {
      auto n = run.trace.count("ROOT_MISMATCH");
      mismatches += n;
      v.require(n == 0, run.label + ": root mismatch");
    }
  }
  v.detail = std::to_string(g_runs.size()) + " runs (" + std::to_string(connectorRuns) +
             " with connectors); connector rows " + std::to_string(one.first) + " at 1 and " +
             std::to_string(fifty.first) + " at 50 communities; root mismatches " + std::to_string(mismatches);
  return v;
}

// ---------------------------------------------------------------------------
// criterion 6

Verdict
twinWindow()
{
  Verdict v;
  for (std::size_t n : {1u, 10u, 100u}) {
    auto r = runTwin(n, 10, 1000);
    auto again = runTwin(n, 10, 1000);
    record("twin/" + std::to_string(n), r.sim->traceLog(), again.sim->traceLog());
    const std::string tag = "N=" + std::to_string(n);
    v.require(r.sent.size() == n, tag + ": sent " + std::to_string(r.sent.size()));
    v.require(r.flushes == 1 && r.flushed == n, tag + ": flushed " + std::to_string(r.flushed));
    v.require(r.after == r.sent, tag + ": delivery after reconnect differs from the sent sequence");
    v.require(!r.expired && !r.fresh, tag + ": twin expired");
  }
  auto late = runTwin(10, 300, 100);
  auto lateAgain = runTwin(10, 300, 100);
  record("twin/expired", late.sim->traceLog(), lateAgain.sim->traceLog());
  v.require(late.expired, "late reconnect: twin did not expire");
  v.require(late.fresh, "late reconnect: not provisioned fresh");
  v.require(late.flushes == 0 && late.after.empty(), "late reconnect: data flushed");
  v.detail = "N in {1, 10, 100} flushed in order; expired reconnect fresh with 0 flushed";
  return v;
}

// ---------------------------------------------------------------------------
// criterion 7

Verdict
joinBound()
{
  Verdict v;
  std::size_t joins = 0;
  for (const auto& run : g_runs) {
    joins += run.trace.count("JOIN");
    for (const auto& line : repeatedJoins(run.trace))
      v.require(false, run.label + ": " + line);
  }
  v.detail = std::to_string(joins) + " controller JOINs over " + std::to_string(g_runs.size()) + " runs";
  return v;
}

// ---------------------------------------------------------------------------
// criterion 8

Verdict
determinism()
{
  Verdict v;
  for (const auto& label : g_nondeterministic)
    v.require(false, label + ": traces differ");
  v.detail = std::to_string(g_repeats) + " runs repeated, " + std::to_string(g_nondeterministic.size()) +
             " differing";
  return v;
}

// ---------------------------------------------------------------------------
// criterion 9

Verdict
codecRobustness()
{
  Verdict v;
  std::mt19937_64 gen(2024);
  std::size_t typed = 0;
  std::size_t accepted = 0;
  for (int i = 0; i < 100000; ++i) {
    Bytes input;
    switch (i % 4) {
    case 0:
      input = randomBytes(gen, 96);
      break;
    case 1:
      input = encode(randomValidMessage(gen));
      input.resize(gen() % (input.size() + 1));
      break;
    default:
      input = encode(randomValidMessage(gen));
      for (auto flips = 1 + gen() % 4; flips > 0 && !input.empty(); --flips)
        input[gen() % input.size()] ^= static_cast<std::uint8_t>(1 + gen() % 255);
      break;
    }
    try {
      auto m = decode(input);
      ++accepted;
      // the decoder takes any TLV order; re-encoding canonicalizes it
      v.require(decode(encode(m)) == m, "accepted input does not survive re-encoding");
    }
    catch (const CodecError&) {
      ++typed;
    }
    catch (const std::exception& e) {
      v.require(false, std::string("untyped exception: ") + e.what());
    }
  }
  std::size_t roundTrips = 0;
  for (int i = 0; i < 10000; ++i) {
    auto m = randomValidMessage(gen);
    try {
      auto bytes = encode(m);
      bool same = decode(bytes) == m && encode(decode(bytes)) == bytes;
      v.require(same, "round trip mismatch");
      roundTrips += same ? 1 : 0;
    }
    catch (const std::exception& e) {
      v.require(false, std::string("valid message rejected: ") + e.what());
    }
  }
  v.detail = "100000 fuzzed (" + std::to_string(typed) + " typed errors, " + std::to_string(accepted) +
             " accepted), " + std::to_string(roundTrips) + "/10000 round trips";
  return v;
}

} // namespace

int
main()
{
  struct Entry
  {
    int id;
    const char* name;
    Verdict (*run)();
  };
  // 5, 7 and 8 inspect the runs recorded by the others, so they go last
  const Entry order[] = {
    {1, "flood-oracle equivalence", floodEquivalence},
    {2, "service-model conformance", serviceConformance},
    {3, "SSM failover", ssmFailover},
    {4, "strategic-forwarding efficiency", fanOut},
    {6, "twin zero-loss window", twinWindow},
    {9, "codec robustness", codecRobustness},
    {5, "segment-routing safety", segmentRouting},
    {7, "controller-visit bound", joinBound},
    {8, "determinism", determinism},
  };

  std::map<int, std::pair<std::string, Verdict>> results;
  for (const auto& e : order) {
    Verdict v;
    try {
      v = e.run();
    }
    catch (const std::exception& ex) {
      v.pass = false;
      v.problems.push_back(std::string("exception: ") + ex.what());
    }
    results[e.id] = {e.name, std::move(v)};
  }

  bool all = true;
  for (const auto& [id, entry] : results) {
    const auto& [name, v] = entry;
    all = all && v.pass;
    std::cout << "criterion " << id << " " << name << ": " << (v.pass ? "PASS" : "FAIL") << " (" << v.detail
              << ")\n";
    for (const auto& p : v.problems)
      std::cout << "    " << p << "\n";
  }
  return all ? 0 : 1;
}

#ifndef YODEL_TESTS_SUPPORT_CONFORMANCE_HPP
#define YODEL_TESTS_SUPPORT_CONFORMANCE_HPP

#include "yodel/sim.hpp"

#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace yodel::test {

/**
 * Checks a flow against its row of the service comparison table: active
 * producer edge count, channels per flow, channel source type and the
 * partitioning flag. Returns one message per violation.
 */
inline std::vector<std::string>
checkServiceRow(const Controller& ctl, const Flow& flow)
{
  std::vector<std::string> out;
  auto fail = [&] (const std::string& what) { out.push_back(flow.label() + ": " + what); };
  const auto row = attributesOf(flow.model);
  const auto active = flow.activeProducerEdges();
  const auto channelIds = flow.channelIds();

  if (flow.isPartitioned() != row.partitioning)
    fail("partitioning flag");

  if (row.activeProducerEdges == Multiplicity::One) {
    std::size_t want = flow.producerEdges.empty() ? 0 : 1;
    if (active.size() != want)
      fail("active producer edges " + std::to_string(active.size()) + " != " + std::to_string(want));
  }
  else if (active.size() != flow.producerEdges.size()) {
    fail("inactive producer edge in a multi-producer service");
  }

  if (row.channelsPerFlow == Multiplicity::One && channelIds.size() != 1)
    fail("channels per flow " + std::to_string(channelIds.size()));
  if (channelIds.empty())
    fail("no channel");

  if (flow.isPartitioned()) {
    std::size_t want = std::max<std::size_t>(1, flow.producerEdges.size());
    if (flow.partitions.size() != want)
      fail("partition count " + std::to_string(flow.partitions.size()) + " != " + std::to_string(want));
    std::map<Yni, int> consumerHome;
    for (const auto& p : flow.partitions) {
      for (const auto& c : p.consumerEdges)
        consumerHome[c]++;
    }
    for (const auto& c : flow.consumerEdges) {
      if (consumerHome[c] != 1)
        fail("consumer edge in " + std::to_string(consumerHome[c]) + " partitions");
    }
    if (consumerHome.size() != flow.consumerEdges.size())
      fail("partition holds an unknown consumer edge");
  }

  for (const auto& ch : ctl.channelsOf(flow)) {
    if (ch.sourceType != row.channelType)
      fail("channel source type");
    if (row.channelType == ChannelSourceType::Single && ch.producerEdges.size() != 1)
      fail("single-source channel with " + std::to_string(ch.producerEdges.size()) + " producer edges");
  }
  return out;
}

/// Host-side view: in single-source services at most one unlocked producer
/// registration exists per channel, and exactly one when any exists.
inline std::vector<std::string>
checkActiveProducers(Simulation& sim, const Flow& flow, const std::vector<std::string>& hosts)
{
  std::vector<std::string> out;
  if (!isSingleSource(flow.model))
    return out;
  for (auto channel : flow.channelIds()) {
    std::size_t rows = 0;
    std::size_t unlocked = 0;
    for (const auto& name : hosts) {
      auto* h = sim.host(name);
      if (!h || !h->alive())
        continue;
      for (const auto& r : h->prt().rows()) {
        if (r.valley != flow.valley || r.channel != channel)
          continue;
        rows++;
        if (!r.lock)
          unlocked++;
      }
    }
    if (unlocked > 1 || (rows > 0 && unlocked == 0))
      out.push_back(flow.label() + ": channel " + std::to_string(channel) + " has " +
                    std::to_string(unlocked) + " unlocked of " + std::to_string(rows) + " producer rows");
  }
  return out;
}

inline const char* SERVICE_WORLD = R"(
domain d
domain t
node e1 edge d
node e2 edge d
node e3 edge d
node e4 edge d
node c1 connector t
node c2 connector t
link e1 c1 1
link e2 c1 1
link e3 c2 1
link e4 c2 1
link c1 c2 2
link e1 e2 1
host h1 u edge=e1
host h2 u edge=e1
host h3 u edge=e2
host h4 u edge=e2
host h5 u edge=e3
host h6 u edge=e3
host h7 u edge=e4
host h8 u edge=e4
)";

struct SequenceResult
{
  std::size_t operations = 0;
  std::size_t checkpoints = 0;
  std::size_t protocolErrors = 0;
  std::vector<std::string> violations;
  Trace trace;
};

/**
 * Random join/leave sequence on one community of @p model. After every
 * operation the simulation runs until quiet and both checkers run.
 */
inline SequenceResult
runServiceSequence(ServiceModel model, std::uint64_t seed, std::size_t operations)
{
  const std::vector<std::string> hosts{"h1", "h2", "h3", "h4", "h5", "h6", "h7", "h8"};
  const std::string modelName(toString(model));
  SimConfig cfg;
  cfg.seed = seed;
  cfg.twinSyncPeriod = 0;
  Simulation sim(TopologySpec::parse(SERVICE_WORLD),
                 ScenarioSpec::parse("at 0 valley v u\nat 0 namespace v ns " + modelName + "\n"), cfg);
  sim.runUntil(1);

  std::mt19937_64 gen(seed);
  std::set<std::pair<std::string, std::string>> joined;
  SequenceResult result;
  Tick t = 2;
  for (std::size_t i = 0; i < operations; ++i) {
    const auto& h = hosts[gen() % hosts.size()];
    std::string role;
    if (model == ServiceModel::MMM)
      role = "member";
    else
      role = gen() % 2 ? "producer" : "consumer";
    std::string verb = joined.count({h, role}) ? "leave" : "join";
    if (verb == "join")
      joined.insert({h, role});
    else
      joined.erase({h, role});
    sim.schedule(t, verb + " " + h + " " + role.substr(0, 1) + " v ns room " + role);
    t += 20;
    sim.runUntil(t);
    result.operations++;

    auto valley = sim.controller().registry().findValley("v")->id;
    auto ns = sim.controller().registry().vib(valley).findNamespace("ns")->id;
    const Flow* flow = sim.controller().findFlow(valley, ns, "room");
    if (!flow)
      continue;
    result.checkpoints++;
    for (auto& v : checkServiceRow(sim.controller(), *flow))
      result.violations.push_back("op " + std::to_string(i) + " " + v);
    for (auto& v : checkActiveProducers(sim, *flow, hosts))
      result.violations.push_back("op " + std::to_string(i) + " " + v);
  }
  result.protocolErrors = sim.metrics().protocolErrors;
  result.trace = sim.traceLog();
  return result;
}

} // namespace yodel::test

#endif // YODEL_TESTS_SUPPORT_CONFORMANCE_HPP

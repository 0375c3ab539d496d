#ifndef YODEL_SIM_HPP
#define YODEL_SIM_HPP

#include "yodel/controller.hpp"
#include "yodel/edge.hpp"
#include "yodel/host.hpp"
#include "yodel/node-context.hpp"
#include "yodel/world.hpp"

#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace yodel {

struct LinkArrival
{
  Yni from;
  Yni to;
  Bytes bytes;
  /// describeMessage() of the payload, kept for tracing
  std::vector<std::pair<std::string, std::string>> fields;
  bool data = false;
  /// twin sync traffic is not traced hop by hop
  bool quiet = false;
};

/// Node to controller.
struct ControllerArrival
{
  YodelMessage msg;
};

/// Controller to node.
struct ControllerDelivery
{
  Yni to;
  Bytes bytes;
};

struct SyncTick
{
};

struct CommandEvent
{
  ScenarioCommand command;
};

using EventPayload = std::variant<LinkArrival, ControllerArrival, ControllerDelivery, SyncTick, CommandEvent>;

struct Event
{
  Tick tick = 0;
  std::uint64_t seq = 0;
  EventPayload payload;
};

/**
 * \brief Pending events in strict (tick, seq) order.
 *
 * seq is assigned at insertion, so events scheduled for the same tick run
 * in the order they were scheduled.
 */
class EventQueue
{
public:
  /// Returns the assigned sequence number.
  std::uint64_t
  push(Tick tick, EventPayload payload);

  bool
  empty() const
  {
    return m_events.empty();
  }

  std::size_t
  size() const
  {
    return m_events.size();
  }

  Tick
  nextTick() const
  {
    return m_events.begin()->first.first;
  }

  Event
  pop();

  template<typename Fn>
  void
  forEach(Fn&& fn) const
  {
    for (const auto& [key, payload] : m_events)
      fn(key.first, payload);
  }

private:
  std::map<std::pair<Tick, std::uint64_t>, EventPayload> m_events;
  std::uint64_t m_nextSeq = 0;
};

struct LinkState
{
  Tick latency = 1;
  bool up = true;
};

/**
 * \brief A whole simulated world: nodes, links, controller and the event
 * loop that drives them.
 *
 * Construction builds the world at tick 0 (nodes, links, controller
 * registration, host provisioning) and schedules the scenario. runUntil()
 * then executes events in (tick, seq) order. Everything random derives from
 * the configured seed.
 */
class Simulation : public NodeContext
{
public:
  Simulation(const TopologySpec& topology, const ScenarioSpec& scenario, SimConfig config);

  ~Simulation() override;

  Simulation(const Simulation&) = delete;
  Simulation&
  operator=(const Simulation&) = delete;

  /// Runs every event with tick <= @p until.
  void
  runUntil(Tick until);

  /// Schedules one more scenario command.
  void
  schedule(Tick tick, const std::string& command);

  // NodeContext
  Tick
  now() const override
  {
    return m_now;
  }

  const SimConfig&
  config() const override
  {
    return m_config;
  }

  void
  transmit(const Yni& from, const Strategy& strategy, std::vector<YodelMessage> messages) override;

  void
  toController(const YodelMessage& msg) override;

  void
  fromController(const YodelMessage& msg) override;

  void
  trace(TraceRecord record) override;

  Metrics&
  metrics() override
  {
    return m_metrics;
  }

  const Metrics&
  metrics() const
  {
    return m_metrics;
  }

  const Trace&
  traceLog() const
  {
    return m_trace;
  }

  Controller&
  controller()
  {
    return *m_controller;
  }

  Node*
  node(const std::string& name);

  Host*
  host(const std::string& name);

  Edge*
  edge(const std::string& name);

  Yni
  yniOf(const std::string& name) const;

  /// Name of a node, or its YNI text if unknown.
  std::string
  nameOf(const Yni& yni) const;

  std::string
  domainOf(const Yni& yni) const;

  const std::map<LinkKey, LinkState>&
  links() const
  {
    return m_links;
  }

  /// Links where sends != receives + in flight + lost, described.
  std::vector<std::string>
  conservationViolations() const;

  std::size_t
  pendingEvents() const
  {
    return m_queue.size();
  }

  /// Metrics as JSON text, with nodes named.
  std::string
  metricsJson() const;

private:
  void
  build(const TopologySpec& topology);

  void
  execute(Event event);

  void
  runCommand(const ScenarioCommand& cmd);

  void
  setLink(const Yni& a, const Yni& b, bool up);

  void
  crashNode(const Yni& yni);

  ValleyNumber
  valleyNumber(const std::string& name) const;

  NamespaceNumber
  namespaceNumber(ValleyNumber valley, const std::string& name) const;

  Host&
  hostRef(const std::string& name);

  void
  ensureSync();

  void
  note(const std::string& event, std::vector<std::pair<std::string, std::string>> fields);

private:
  SimConfig m_config;
  Tick m_now = 0;
  EventQueue m_queue;
  Trace m_trace;
  Metrics m_metrics;
  std::unique_ptr<Controller> m_controller;
  std::map<Yni, std::unique_ptr<Node>> m_nodes;
  std::map<std::string, Yni> m_byName;
  std::map<Yni, std::string> m_names;
  std::map<Yni, std::string> m_domains;
  std::map<LinkKey, LinkState> m_links;
  bool m_syncScheduled = false;
};

/// Bundles a finished run for callers that only want the artifacts.
struct RunResult
{
  std::string trace;
  std::string metrics;
  std::uint64_t protocolErrors = 0;
  std::vector<std::string> conservationViolations;
};

RunResult
runScenario(const TopologySpec& topology, const ScenarioSpec& scenario, const SimConfig& config, Tick until);

} // namespace yodel

#endif // YODEL_SIM_HPP

#ifndef YODEL_TESTS_SUPPORT_WORLD_HPP
#define YODEL_TESTS_SUPPORT_WORLD_HPP

#include "yodel/sim.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace yodel::test {

inline std::unique_ptr<Simulation>
makeSim(const std::string& topology, const std::string& scenario, std::uint64_t seed = 1,
        SimConfig config = {})
{
  config.seed = seed;
  return std::make_unique<Simulation>(TopologySpec::parse(topology), ScenarioSpec::parse(scenario), config);
}

/// Trace records of one event kind, optionally only those emitted by a named node.
inline std::vector<TraceRecord>
events(Simulation& sim, const std::string& event, const std::optional<std::string>& node = std::nullopt)
{
  std::optional<std::string> label;
  if (node)
    label = sim.yniOf(*node).toString();
  std::vector<TraceRecord> out;
  for (const auto& r : sim.traceLog().records()) {
    if (r.event == event && (!label || r.node == *label))
      out.push_back(r);
  }
  return out;
}

inline std::size_t
count(Simulation& sim, const std::string& event, const std::optional<std::string>& node = std::nullopt)
{
  return events(sim, event, node).size();
}

inline std::string
field(const TraceRecord& r, std::string_view key)
{
  auto v = r.get(key);
  return v ? std::string(*v) : std::string();
}

/// Message IDs delivered to a host, in delivery order.
inline std::vector<std::string>
delivered(Simulation& sim, const std::string& host)
{
  std::vector<std::string> out;
  for (const auto& r : events(sim, "DELIVER", host))
    out.push_back(field(r, "msg"));
  return out;
}

} // namespace yodel::test

#endif // YODEL_TESTS_SUPPORT_WORLD_HPP

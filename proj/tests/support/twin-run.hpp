#ifndef YODEL_TESTS_SUPPORT_TWIN_RUN_HPP
#define YODEL_TESTS_SUPPORT_TWIN_RUN_HPP

#include "support/world.hpp"

#include <set>

namespace yodel::test {

inline const char* TWIN_WORLD = R"(
domain a
domain b
node e1 edge a
node e2 edge b
node c1 connector b
link e1 c1 2
link c1 e2 2
host cam alice edge=e1
host screen bob edge=e2
)";

struct TwinRun
{
  std::unique_ptr<Simulation> sim;
  std::vector<std::string> sent;
  std::vector<std::string> before;
  std::vector<std::string> after;
  std::uint64_t flushed = 0;
  std::size_t flushes = 0;
  bool expired = false;
  bool fresh = false;
};

/**
 * Consumer "screen" drops off at tick 30. Once its twin is active, "cam"
 * sends @p n messages; the consumer comes back @p gap ticks after the last
 * one.
 */
inline TwinRun
runTwin(std::size_t n, Tick gap, Tick timeout, std::uint64_t seed = 1)
{
  TwinRun r;
  SimConfig cfg;
  cfg.twinTimeout = timeout;
  r.sim = makeSim(TWIN_WORLD, R"(
at 0 valley city alice
at 0 member city bob
at 0 namespace city video MSM
at 5 join cam feed city video lobby producer
at 6 join screen view city video lobby consumer
at 20 send cam feed city video lobby
at 30 fault host-disconnect screen
)", seed, cfg);
  auto& sim = *r.sim;
  while (count(sim, "TWIN_ACTIVE") == 0 && sim.now() < 1000)
    sim.runUntil(sim.now() + 1);
  r.before = delivered(sim, "screen");

  Tick start = sim.now() + 1;
  sim.schedule(start, "send cam feed city video lobby count=" + std::to_string(n) + " every=1");
  sim.schedule(start + n + gap, "fault host-reconnect screen");
  sim.runUntil(start + n + gap + 50);

  auto all = delivered(sim, "screen");
  r.after.assign(all.begin() + static_cast<std::ptrdiff_t>(r.before.size()), all.end());
  for (const auto& rec : events(sim, "PUBLISH", "cam")) {
    if (rec.tick >= start)
      r.sent.push_back(field(rec, "msg"));
  }
  for (const auto& rec : events(sim, "TWIN_FLUSH", "e2")) {
    r.flushed += std::stoull(field(rec, "count"));
    r.flushes++;
  }
  r.expired = count(sim, "TWIN_EXPIRE", "e2") > 0;
  r.fresh = count(sim, "REG_RESET", "screen") > 0;
  return r;
}

} // namespace yodel::test

#endif // YODEL_TESTS_SUPPORT_TWIN_RUN_HPP

#include "support/world.hpp"

#include "yodel/strategy.hpp"

#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

using namespace yodel;
using namespace yodel::test;

namespace {

Yni
n(std::uint8_t i)
{
  return Yni({0x02, 0, 0, 0, 0, i}, 1);
}

std::string
sample(const std::string& name)
{
  std::ifstream in(std::string(YODEL_SAMPLES) + "/" + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t
transmissionsOf(const std::vector<PlanStep>& plan)
{
  return plan.size();
}

const std::string TWO_EDGES = R"(
domain d
node e1 edge d
node e2 edge d
link e1 e2 1
host a alice edge=e1
host b alice edge=e1
host c alice edge=e2
)";

const std::string PREAMBLE = R"(
at 0 valley v alice
at 0 namespace v ns MSM
at 0 namespace v many MMM
)";

} // namespace

TEST_SUITE("dataplane") {

TEST_CASE("unicast-only fan-out needs one transmission per neighbor")
{
  AcTable act;
  for (std::uint8_t i = 1; i <= 3; ++i)
    act.addNeighbor(n(i), 1);
  auto plan = selectStrategies({n(1), n(2), n(3)}, act);
  CHECK(transmissionsOf(plan) == 3);
  for (const auto& s : act.strategies())
    CHECK(s.stats.uses == 1);
}

TEST_CASE("a covering multicast strategy needs one transmission")
{
  AcTable act;
  for (std::uint8_t i = 1; i <= 3; ++i)
    act.addNeighbor(n(i), 1);
  act.addMulticast({n(1), n(2), n(3)}, 1);
  auto plan = selectStrategies({n(1), n(2), n(3)}, act);
  REQUIRE(plan.size() == 1);
  CHECK(plan[0].covered == std::set<Yni>{n(1), n(2), n(3)});
  CHECK(act.strategies()[plan[0].strategy].kind == Strategy::Kind::LocalMulticast);
  // every row lists the multicast strategy
  for (std::uint8_t i = 1; i <= 3; ++i)
    CHECK(act.row(n(i)).size() == 2);
}

TEST_CASE("mixed cover and availability")
{
  AcTable act;
  for (std::uint8_t i = 1; i <= 3; ++i)
    act.addNeighbor(n(i), 1);
  act.addMulticast({n(1), n(2)}, 1);
  CHECK(selectStrategies({n(1), n(2), n(3)}, act).size() == 2);
  CHECK(selectStrategies({n(3)}, act).size() == 1);

  act.setNeighborReachable(n(2), false);
  CHECK_FALSE(act.isReachable(n(2)));
  auto plan = selectStrategies({n(1), n(3)}, act);
  CHECK(plan.size() == 2);
  for (const auto& step : plan)
    CHECK(act.strategies()[step.strategy].kind == Strategy::Kind::Unicast);
  CHECK_THROWS_AS(selectStrategies({n(2)}, act), UncoverableNeighbor);

  act.setNeighborReachable(n(2), true);
  CHECK(selectStrategies({n(1), n(2)}, act).size() == 1);

  act.removeNeighbor(n(1));
  CHECK_FALSE(act.hasNeighbor(n(1)));
  CHECK(act.strategies().size() == 2);
}

TEST_CASE("greedy cover covers each neighbor exactly once")
{
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 300; ++trial) {
    AcTable act;
    std::uint8_t count = 2 + gen() % 8;
    for (std::uint8_t i = 1; i <= count; ++i)
      act.addNeighbor(n(i), 1 + gen() % 3);
    for (int g = gen() % 4; g > 0; --g) {
      std::set<Yni> covers;
      for (std::uint8_t i = 1; i <= count; ++i) {
        if (gen() % 2)
          covers.insert(n(i));
      }
      if (covers.size() >= 2)
        act.addMulticast(covers, 1 + gen() % 3);
    }
    std::set<Yni> required;
    for (std::uint8_t i = 1; i <= count; ++i) {
      if (gen() % 3)
        required.insert(n(i));
    }
    auto plan = selectStrategies(required, act);
    std::multiset<Yni> covered;
    for (const auto& step : plan) {
      CHECK_FALSE(step.covered.empty());
      for (const auto& y : step.covered) {
        covered.insert(y);
        CHECK(act.strategies()[step.strategy].covers.count(y) == 1);
      }
    }
    CHECK(covered == std::multiset<Yni>(required.begin(), required.end()));
    CHECK(plan.size() <= required.size());
  }
}

TEST_CASE("fan-out transmissions in the transit domain")
{
  auto scn = sample("fanout.scn");
  auto uni = makeSim(sample("fanout.topo"), scn);
  uni->runUntil(100);
  auto mc = makeSim(sample("fanout-mcast.topo"), scn);
  mc->runUntil(100);

  const std::uint64_t messages = count(*uni, "PUBLISH");
  REQUIRE(messages == 4);
  CHECK(uni->metrics().domainTransmissions("transit") == 3 * messages);
  CHECK(mc->metrics().domainTransmissions("transit") == 1 * messages);
  for (const auto& h : {"s2", "s3", "s4"}) {
    CHECK(delivered(*uni, h).size() == messages);
    CHECK(delivered(*mc, h) == delivered(*uni, h));
  }
}

TEST_CASE("in-host and in-edge delivery without echo")
{
  auto sim = makeSim(TWO_EDGES, PREAMBLE + R"(
at 5 join a pub v ns room producer
at 5 join a sub v ns room consumer
at 5 join b sub v ns room consumer
at 5 join c sub v ns room consumer
at 20 send a pub v ns room
)");
  sim->runUntil(60);
  auto inHost = events(*sim, "DELIVER", "a");
  REQUIRE(inHost.size() == 1);
  CHECK(field(inHost[0], "via") == "host");
  CHECK(field(inHost[0], "lat") == "0");

  auto inEdge = events(*sim, "DELIVER", "b");
  REQUIRE(inEdge.size() == 1);
  CHECK(field(inEdge[0], "via") == "edge");
  CHECK(delivered(*sim, "c").size() == 1);
  CHECK(sim->metrics().protocolErrors == 0);

  // the sending host never gets its own message back from the edge
  for (const auto& r : events(*sim, "SEND", "e1")) {
    if (field(r, "kind") == "data-ypp")
      CHECK(field(r, "to") != sim->yniOf("a").toString());
  }
}

TEST_CASE("MMM members do not receive their own messages")
{
  auto sim = makeSim(TWO_EDGES, PREAMBLE + R"(
at 5 join a m v many room member
at 5 join b m v many room member
at 5 join c m v many room member
at 20 send a m v many room
at 22 send c m v many room
)");
  sim->runUntil(60);
  CHECK(delivered(*sim, "a") == std::vector<std::string>{"c.m#1"});
  CHECK(delivered(*sim, "b") == std::vector<std::string>{"a.m#1", "c.m#1"});
  CHECK(delivered(*sim, "c") == std::vector<std::string>{"a.m#1"});
}

TEST_CASE("connectors forward each message once by popping the path")
{
  auto sim = makeSim(sample("ssm.topo"), sample("ssm.scn"));
  sim->runUntil(200);
  std::map<std::pair<std::string, std::string>, int> seen;
  for (const auto* name : {"c1", "c2"}) {
    for (const auto& r : events(*sim, "RECV", std::string(name))) {
      if (field(r, "kind") != "data-ysync")
        continue;
      CHECK(++seen[{name, field(r, "msg")}] == 1);
    }
  }
  CHECK_FALSE(seen.empty());
  CHECK(count(*sim, "ROOT_MISMATCH") == 0);
  CHECK(sim->metrics().protocolErrors == 0);
}

TEST_CASE("unknown channel data is dropped at the edge")
{
  auto sim = makeSim(TWO_EDGES, PREAMBLE);
  sim->runUntil(5);
  YodelMessage m;
  m.fixed = {MessageKind::DataYpp, sim->yniOf("a"), sim->yniOf("e1")};
  m.floating.valleyId = 1;
  m.floating.channelId = 999;
  m.data = {'z'};
  m.finalize();
  sim->node("e1")->receive(sim->yniOf("a"), encode(m));
  auto drops = events(*sim, "DROP", "e1");
  REQUIRE(drops.size() == 1);
  CHECK(field(drops[0], "reason") == "unknown-channel");
}

TEST_CASE("malformed bytes are reported, not thrown")
{
  auto sim = makeSim(TWO_EDGES, PREAMBLE);
  sim->runUntil(5);
  Bytes junk{0x7f, 1, 2};
  CHECK_NOTHROW(sim->node("e2")->receive(sim->yniOf("e1"), junk));
  CHECK(count(*sim, "ERROR", "e2") == 1);
}

}

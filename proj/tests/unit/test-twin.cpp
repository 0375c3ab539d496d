#include "support/twin-run.hpp"

#include "yodel/twin.hpp"

#include <doctest.h>

using namespace yodel;
using namespace yodel::test;

namespace {

Yni
n(std::uint8_t i)
{
  return Yni({0x02, 0, 0, 0, 0, i}, 1);
}

BufferedMessage
buffered(Tick t, std::uint8_t tag)
{
  YodelMessage m;
  m.fixed = {MessageKind::DataYpp, n(1), n(2)};
  m.floating.valleyId = 1;
  m.floating.channelId = 1;
  m.data = {tag};
  m.finalize();
  return {t, m};
}

} // namespace

TEST_SUITE("twin") {

TEST_CASE("twin table bookkeeping")
{
  TwinTable table(n(9));
  auto& t1 = table.create(n(1), 100);
  auto& t2 = table.create(n(2), 50);
  CHECK(t1.alphorn != t2.alphorn);
  CHECK(t1.alphorn != n(1));
  CHECK_THROWS(table.create(n(1), 10));
  CHECK(table.hostOfAlphorn(t2.alphorn) == n(2));
  CHECK_FALSE(table.hostOfAlphorn(n(7)).has_value());
  CHECK(table.hat().size() == 2);
  CHECK(*table.hatRow(n(1)) == HatRow{n(1), t1.alphorn, 100});

  CHECK(table.expired(50).empty());
  CHECK(table.expired(51) == std::vector<Yni>{n(2)});
  table.resetTimer(n(2), 500);
  CHECK(table.expired(200) == std::vector<Yni>{n(1)});

  table.destroy(n(1));
  CHECK(table.find(n(1)) == nullptr);
  CHECK(table.hatRow(n(1)) == nullptr);
  CHECK(table.size() == 1);
}

TEST_CASE("buffering needs an active twin and keeps order")
{
  TwinTable table(n(9));
  table.create(n(1), 100);
  CHECK_THROWS_AS(table.bufferMessage(n(1), buffered(1, 1), 0), std::logic_error);
  CHECK(table.find(n(1))->buffer.empty());

  table.find(n(1))->active = true;
  for (std::uint8_t i = 0; i < 5; ++i)
    table.bufferMessage(n(1), buffered(i, i), 0);
  auto out = table.takeBuffer(n(1));
  REQUIRE(out.size() == 5);
  for (std::uint8_t i = 0; i < 5; ++i)
    CHECK(out[i].msg.data == Bytes{i});
  CHECK(table.find(n(1))->buffer.empty());
}

TEST_CASE("a bounded buffer drops the oldest message")
{
  TwinTable table(n(9));
  table.create(n(1), 100).active = true;
  std::size_t dropped = 0;
  for (std::uint8_t i = 0; i < 6; ++i)
    dropped += table.bufferMessage(n(1), buffered(i, i), 4);
  CHECK(dropped == 2);
  auto out = table.takeBuffer(n(1));
  REQUIRE(out.size() == 4);
  CHECK(out.front().msg.data == Bytes{2});
  CHECK(out.back().msg.data == Bytes{5});
}

TEST_CASE("registration replica text round trip")
{
  RegistrationTables t;
  t.prt.upsert({1, 2, 3, std::nullopt, false});
  t.crt.upsert({4, 5, 6, 70, true});
  t.crt.upsert({4, 5, 7, std::nullopt, false});
  CHECK(RegistrationTables::decode(t.encode()) == t);
  CHECK(RegistrationTables::decode(RegistrationTables{}.encode()) == RegistrationTables{});
  CHECK_THROWS_AS(RegistrationTables::decode("garbage"), std::invalid_argument);
}

TEST_CASE("the twin activates after the miss threshold")
{
  auto r = runTwin(1, 10, 1000);
  auto& sim = *r.sim;
  auto misses = events(sim, "TWIN_MISS", "e2");
  REQUIRE(misses.size() >= sim.config().twinThreshold);
  auto active = events(sim, "TWIN_ACTIVE", "e2");
  REQUIRE(active.size() == 1);
  CHECK(active[0].tick == misses[sim.config().twinThreshold - 1].tick);
}

TEST_CASE("reconnect before expiry flushes everything in order")
{
  for (std::size_t n : {1u, 10u, 100u}) {
    CAPTURE(n);
    auto r = runTwin(n, 10, 1000);
    CHECK(r.sent.size() == n);
    CHECK(r.flushes == 1);
    CHECK(r.flushed == n);
    CHECK(r.after == r.sent);
    CHECK_FALSE(r.expired);
    CHECK_FALSE(r.fresh);
    CHECK(count(*r.sim, "RECONNECTED", "screen") == 1);
    CHECK(r.sim->metrics().protocolErrors == 0);
  }
}

TEST_CASE("reconnect after expiry starts fresh without a flush")
{
  auto r = runTwin(10, 300, 100);
  CHECK(r.expired);
  CHECK(r.fresh);
  CHECK(r.flushes == 0);
  CHECK(r.after.empty());
  auto creates = events(*r.sim, "TWIN_CREATE", "e2");
  REQUIRE(creates.size() == 2);
  CHECK(field(creates[1], "fresh") == "1");
  CHECK(r.sim->host("screen")->crt().size() == 0);
}

TEST_CASE("the host learns its AlpHorn")
{
  auto r = runTwin(1, 10, 1000);
  auto* twin = r.sim->edge("e2")->twins().find(r.sim->yniOf("screen"));
  REQUIRE(twin != nullptr);
  REQUIRE(r.sim->host("screen")->alphorn().has_value());
  CHECK(*r.sim->host("screen")->alphorn() == twin->alphorn);
  CHECK(r.sim->host("screen")->act().hasNeighbor(twin->alphorn));
}

TEST_CASE("buffer limit from the scenario")
{
  SimConfig cfg;
  cfg.twinBufferMax = 3;
  cfg.twinTimeout = 1000;
  auto sim = makeSim(TWIN_WORLD, R"(
at 0 valley city alice
at 0 member city bob
at 0 namespace city video MSM
at 5 join cam feed city video lobby producer
at 6 join screen view city video lobby consumer
at 30 fault host-disconnect screen
at 80 send cam feed city video lobby count=5
at 150 fault host-reconnect screen
)", 1, cfg);
  sim->runUntil(200);
  CHECK(delivered(*sim, "screen") == std::vector<std::string>{"cam.feed#3", "cam.feed#4", "cam.feed#5"});
  CHECK(sim->metrics().bufferPeaks.at(sim->yniOf("e2")) == 3);
}

}

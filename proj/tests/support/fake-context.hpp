#ifndef YODEL_TESTS_SUPPORT_FAKE_CONTEXT_HPP
#define YODEL_TESTS_SUPPORT_FAKE_CONTEXT_HPP

#include "yodel/control-message.hpp"
#include "yodel/node-context.hpp"

#include <vector>

namespace yodel::test {

/// Records everything instead of delivering it.
class FakeContext : public NodeContext
{
public:
  struct Transmission
  {
    Yni from;
    Strategy strategy;
    std::vector<YodelMessage> messages;
  };

  Tick
  now() const override
  {
    return tick;
  }

  const SimConfig&
  config() const override
  {
    return cfg;
  }

  void
  transmit(const Yni& from, const Strategy& strategy, std::vector<YodelMessage> messages) override
  {
    sent.push_back({from, strategy, std::move(messages)});
  }

  void
  toController(const YodelMessage& msg) override
  {
    up.push_back(msg);
  }

  void
  fromController(const YodelMessage& msg) override
  {
    down.push_back(msg);
  }

  void
  trace(TraceRecord record) override
  {
    log.add(std::move(record));
  }

  Metrics&
  metrics() override
  {
    return m;
  }

  /// Bodies of controller-to-node messages with @p op, in send order.
  std::vector<std::pair<Yni, ControlBody>>
  downOps(ControlOp op) const
  {
    std::vector<std::pair<Yni, ControlBody>> out;
    for (const auto& msg : down) {
      auto body = ControlBody::decode(msg.data);
      if (body.op == op)
        out.emplace_back(msg.fixed.receiver, body);
    }
    return out;
  }

  Tick tick = 0;
  SimConfig cfg;
  std::vector<Transmission> sent;
  std::vector<YodelMessage> up;
  std::vector<YodelMessage> down;
  Trace log;
  Metrics m;
};

} // namespace yodel::test

#endif // YODEL_TESTS_SUPPORT_FAKE_CONTEXT_HPP

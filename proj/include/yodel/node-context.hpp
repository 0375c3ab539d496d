#ifndef YODEL_NODE_CONTEXT_HPP
#define YODEL_NODE_CONTEXT_HPP

#include "yodel/codec.hpp"
#include "yodel/config.hpp"
#include "yodel/metrics.hpp"
#include "yodel/strategy.hpp"
#include "yodel/trace.hpp"

#include <vector>

namespace yodel {

/**
 * \brief Services a node or the controller gets from the hosting simulator.
 *
 * All sends are asynchronous: the message arrives after the link or
 * controller latency, never during the call.
 */
class NodeContext
{
public:
  virtual
  ~NodeContext() = default;

  virtual Tick
  now() const = 0;

  virtual const SimConfig&
  config() const = 0;

  /**
   * One underlay transmission from @p from using @p strategy. Each message
   * is addressed (fixed.receiver) to a distinct neighbor covered by the
   * strategy.
   */
  virtual void
  transmit(const Yni& from, const Strategy& strategy, std::vector<YodelMessage> messages) = 0;

  /// Node to controller.
  virtual void
  toController(const YodelMessage& msg) = 0;

  /// Controller to node; fixed.receiver names the node.
  virtual void
  fromController(const YodelMessage& msg) = 0;

  virtual void
  trace(TraceRecord record) = 0;

  virtual Metrics&
  metrics() = 0;
};

} // namespace yodel

#endif // YODEL_NODE_CONTEXT_HPP

#ifndef YODEL_TWIN_HPP
#define YODEL_TWIN_HPP

#include "yodel/codec.hpp"
#include "yodel/registration.hpp"
#include "yodel/trace.hpp"

#include <deque>
#include <map>
#include <optional>
#include <vector>

namespace yodel {

struct BufferedMessage
{
  Tick arrival = 0;
  YodelMessage msg;
};

/**
 * \brief Edge-resident digital twin (AlpHorn) of one host.
 *
 * Holds a replica of the host's registration tables and, while active,
 * buffers what the edge would have sent to the host.
 */
struct HostTwin
{
  Yni alphorn;
  Yni host;
  RegistrationTables replica;
  std::deque<BufferedMessage> buffer;
  bool active = false;
  /// Consecutive sync queries left unanswered.
  std::uint32_t missed = 0;
  /// A sync query is outstanding.
  bool awaiting = false;
  std::uint64_t peakBuffer = 0;
};

/// Host-AlpHorn table row.
struct HatRow
{
  Yni host;
  Yni alphorn;
  Tick timer = 0;

  friend bool operator==(const HatRow&, const HatRow&) = default;
};

/**
 * \brief The HAT and the twins of one edge.
 *
 * AlpHorn YNIs are derived from the edge YNI and a per-edge counter, so they
 * are unique on the edge and never reused.
 */
class TwinTable
{
public:
  explicit
  TwinTable(const Yni& edge)
    : m_edge(edge)
  {
  }

  /// Creates the twin and its HAT row. The host must not have one yet.
  HostTwin&
  create(const Yni& host, Tick timer);

  HostTwin*
  find(const Yni& host);

  const HostTwin*
  find(const Yni& host) const;

  /// Host whose twin uses @p alphorn.
  std::optional<Yni>
  hostOfAlphorn(const Yni& alphorn) const;

  const HatRow*
  hatRow(const Yni& host) const;

  std::vector<HatRow>
  hat() const;

  void
  resetTimer(const Yni& host, Tick timer);

  /// Hosts whose HAT timer is below @p now.
  std::vector<Yni>
  expired(Tick now) const;

  void
  destroy(const Yni& host);

  /**
   * Appends to an active twin's buffer. With @p maxSize > 0 the oldest
   * message is dropped when full; returns the number dropped.
   */
  std::size_t
  bufferMessage(const Yni& host, BufferedMessage message, std::size_t maxSize);

  /// Empties and returns the buffer in arrival order.
  std::vector<BufferedMessage>
  takeBuffer(const Yni& host);

  std::size_t
  size() const
  {
    return m_twins.size();
  }

private:
  Yni m_edge;
  std::uint32_t m_counter = 0;
  std::map<Yni, HostTwin> m_twins;
  std::map<Yni, HatRow> m_hat;
};

} // namespace yodel

#endif // YODEL_TWIN_HPP

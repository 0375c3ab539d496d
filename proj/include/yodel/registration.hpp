#ifndef YODEL_REGISTRATION_HPP
#define YODEL_REGISTRATION_HPP

#include "yodel/model.hpp"
#include "yodel/trace.hpp"

#include <optional>
#include <string>
#include <vector>

namespace yodel {

/// One PRT or CRT row.
struct RegistrationRow
{
  ApplicationId app = 0;
  ValleyNumber valley = 0;
  ChannelId channel = 0;
  /// Expiry tick; nullopt means the row never expires.
  std::optional<Tick> expiry;
  bool lock = false;

  bool
  expiredAt(Tick now) const
  {
    return expiry && *expiry <= now;
  }

  friend bool operator==(const RegistrationRow&, const RegistrationRow&) = default;
};

/// A host's producer or consumer registration table. At most one row per
/// (application, valley, channel).
class RegistrationTable
{
public:
  RegistrationRow*
  find(ApplicationId app, ValleyNumber valley, ChannelId channel);

  const RegistrationRow*
  find(ApplicationId app, ValleyNumber valley, ChannelId channel) const;

  /// Inserts or replaces the row with the same key.
  RegistrationRow&
  upsert(const RegistrationRow& row);

  bool
  erase(ApplicationId app, ValleyNumber valley, ChannelId channel);

  std::vector<RegistrationRow*>
  matching(ValleyNumber valley, ChannelId channel);

  const std::vector<RegistrationRow>&
  rows() const
  {
    return m_rows;
  }

  std::size_t
  size() const
  {
    return m_rows.size();
  }

  void
  clear()
  {
    m_rows.clear();
  }

  friend bool operator==(const RegistrationTable&, const RegistrationTable&) = default;

private:
  std::vector<RegistrationRow> m_rows;
};

/// The pair of tables a twin replicates.
struct RegistrationTables
{
  RegistrationTable prt;
  RegistrationTable crt;

  /// Compact text form carried by twin sync responses.
  std::string
  encode() const;

  /// Throws std::invalid_argument on malformed input.
  static RegistrationTables
  decode(const std::string& text);

  friend bool operator==(const RegistrationTables&, const RegistrationTables&) = default;
};

} // namespace yodel

#endif // YODEL_REGISTRATION_HPP

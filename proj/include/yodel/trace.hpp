#ifndef YODEL_TRACE_HPP
#define YODEL_TRACE_HPP

#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace yodel {

using Tick = std::uint64_t;

/**
 * \brief One line of the simulation trace.
 *
 * Rendered as "t=<tick> <EVENT> node=<label> key=value ...". Field order is
 * insertion order, so the text form is deterministic.
 */
struct TraceRecord
{
  Tick tick = 0;
  std::string event;
  std::string node;
  std::vector<std::pair<std::string, std::string>> fields;

  std::optional<std::string_view>
  get(std::string_view key) const;

  std::string
  toLine() const;

  /// Parses a line produced by toLine(); nullopt for blank or malformed input.
  static std::optional<TraceRecord>
  parse(std::string_view line);
};

class Trace
{
public:
  void
  add(TraceRecord rec);

  void
  add(Tick tick, std::string event, std::string node,
      std::initializer_list<std::pair<std::string, std::string>> fields = {});

  const std::vector<TraceRecord>&
  records() const
  {
    return m_records;
  }

  std::size_t
  count(std::string_view event) const;

  void
  write(std::ostream& os) const;

  std::string
  text() const;

  void
  clear()
  {
    m_records.clear();
  }

private:
  std::vector<TraceRecord> m_records;
};

} // namespace yodel

#endif // YODEL_TRACE_HPP

#include "yodel/trace.hpp"

#include <ostream>
#include <sstream>

namespace yodel {

std::optional<std::string_view>
TraceRecord::get(std::string_view key) const
{
  for (const auto& [k, v] : fields) {
    if (k == key)
      return std::string_view(v);
  }
  return std::nullopt;
}

std::string
TraceRecord::toLine() const
{
  std::string line = "t=" + std::to_string(tick) + " " + event + " node=" + node;
  for (const auto& [k, v] : fields) {
    line += ' ';
    line += k;
    line += '=';
    line += v;
  }
  return line;
}

std::optional<TraceRecord>
TraceRecord::parse(std::string_view line)
{
  std::vector<std::string_view> words;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && line[pos] == ' ')
      ++pos;
    std::size_t end = line.find(' ', pos);
    if (end == std::string_view::npos)
      end = line.size();
    if (end > pos)
      words.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  if (words.size() < 3 || words[0].substr(0, 2) != "t=" || words[2].substr(0, 5) != "node=")
    return std::nullopt;

  TraceRecord rec;
  try {
    rec.tick = std::stoull(std::string(words[0].substr(2)));
  }
  catch (const std::exception&) {
    return std::nullopt;
  }
  rec.event = std::string(words[1]);
  rec.node = std::string(words[2].substr(5));
  for (std::size_t i = 3; i < words.size(); ++i) {
    auto eq = words[i].find('=');
    if (eq == std::string_view::npos)
      return std::nullopt;
    rec.fields.emplace_back(std::string(words[i].substr(0, eq)), std::string(words[i].substr(eq + 1)));
  }
  return rec;
}

void
Trace::add(TraceRecord rec)
{
  m_records.push_back(std::move(rec));
}

void
Trace::add(Tick tick, std::string event, std::string node,
           std::initializer_list<std::pair<std::string, std::string>> fields)
{
  TraceRecord rec;
  rec.tick = tick;
  rec.event = std::move(event);
  rec.node = std::move(node);
  rec.fields.assign(fields.begin(), fields.end());
  m_records.push_back(std::move(rec));
}

std::size_t
Trace::count(std::string_view event) const
{
  std::size_t n = 0;
  for (const auto& r : m_records) {
    if (r.event == event)
      ++n;
  }
  return n;
}

void
Trace::write(std::ostream& os) const
{
  for (const auto& r : m_records)
    os << r.toLine() << '\n';
}

std::string
Trace::text() const
{
  std::ostringstream os;
  write(os);
  return os.str();
}

} // namespace yodel

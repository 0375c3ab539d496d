#include "yodel/twin.hpp"

#include "yodel/rng.hpp"

#include <stdexcept>

namespace yodel {

HostTwin&
TwinTable::create(const Yni& host, Tick timer)
{
  if (m_twins.count(host) > 0)
    throw std::logic_error("host " + host.toString() + " already has a twin");

  ++m_counter;
  std::uint64_t h = hashBytes(m_counter, m_edge.octets());
  MacAddress mac{};
  for (std::size_t i = 0; i < mac.size(); ++i)
    mac[i] = static_cast<std::uint8_t>(h >> (8 * i));
  mac[0] = static_cast<std::uint8_t>((mac[0] | 0x02) & 0xfe);
  Yni alphorn(mac, m_counter);

  HostTwin twin;
  twin.alphorn = alphorn;
  twin.host = host;
  m_hat[host] = {host, alphorn, timer};
  return m_twins.emplace(host, std::move(twin)).first->second;
}

HostTwin*
TwinTable::find(const Yni& host)
{
  auto it = m_twins.find(host);
  return it == m_twins.end() ? nullptr : &it->second;
}

const HostTwin*
TwinTable::find(const Yni& host) const
{
  auto it = m_twins.find(host);
  return it == m_twins.end() ? nullptr : &it->second;
}

std::optional<Yni>
TwinTable::hostOfAlphorn(const Yni& alphorn) const
{
  for (const auto& [host, row] : m_hat) {
    if (row.alphorn == alphorn)
      return host;
  }
  return std::nullopt;
}

const HatRow*
TwinTable::hatRow(const Yni& host) const
{
  auto it = m_hat.find(host);
  return it == m_hat.end() ? nullptr : &it->second;
}

std::vector<HatRow>
TwinTable::hat() const
{
  std::vector<HatRow> out;
  for (const auto& [host, row] : m_hat)
    out.push_back(row);
  return out;
}

void
TwinTable::resetTimer(const Yni& host, Tick timer)
{
  auto it = m_hat.find(host);
  if (it != m_hat.end())
    it->second.timer = timer;
}

std::vector<Yni>
TwinTable::expired(Tick now) const
{
  std::vector<Yni> out;
  for (const auto& [host, row] : m_hat) {
    if (row.timer < now)
      out.push_back(host);
  }
  return out;
}

void
TwinTable::destroy(const Yni& host)
{
  m_twins.erase(host);
  m_hat.erase(host);
}

std::size_t
TwinTable::bufferMessage(const Yni& host, BufferedMessage message, std::size_t maxSize)
{
  auto* twin = find(host);
  if (!twin || !twin->active)
    throw std::logic_error("buffering for a host without an active twin");
  std::size_t dropped = 0;
  twin->buffer.push_back(std::move(message));
  while (maxSize > 0 && twin->buffer.size() > maxSize) {
    twin->buffer.pop_front();
    ++dropped;
  }
  twin->peakBuffer = std::max<std::uint64_t>(twin->peakBuffer, twin->buffer.size());
  return dropped;
}

std::vector<BufferedMessage>
TwinTable::takeBuffer(const Yni& host)
{
  auto* twin = find(host);
  if (!twin)
    return {};
  std::vector<BufferedMessage> out(std::make_move_iterator(twin->buffer.begin()),
                                   std::make_move_iterator(twin->buffer.end()));
  twin->buffer.clear();
  return out;
}

} // namespace yodel

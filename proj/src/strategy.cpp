#include "yodel/strategy.hpp"

#include <algorithm>

namespace yodel {

void
AcTable::addNeighbor(const Yni& neighbor, Tick latency, std::string underlay)
{
  for (auto& s : m_strategies) {
    if (s.kind == Strategy::Kind::Unicast && s.covers.count(neighbor) > 0) {
      s.stats.latency = latency;
      m_reachable[neighbor] = true;
      setNeighborReachable(neighbor, true);
      return;
    }
  }
  Strategy s;
  s.kind = Strategy::Kind::Unicast;
  s.covers = {neighbor};
  s.underlayAddress = underlay.empty() ? "ucast:" + neighbor.toString() : std::move(underlay);
  s.stats.latency = latency;
  m_strategies.push_back(std::move(s));
  m_reachable[neighbor] = true;
  rebuildRows();
}

void
AcTable::removeNeighbor(const Yni& neighbor)
{
  std::erase_if(m_strategies, [&] (const Strategy& s) { return s.covers.count(neighbor) > 0; });
  m_reachable.erase(neighbor);
  rebuildRows();
}

void
AcTable::addMulticast(const std::set<Yni>& covers, Tick latency, std::string underlay)
{
  if (covers.size() < 2)
    throw std::invalid_argument("a local-multicast strategy must cover at least two neighbors");
  for (const auto& n : covers) {
    if (m_reachable.count(n) == 0)
      throw std::invalid_argument("multicast strategy covers unknown neighbor " + n.toString());
  }
  Strategy s;
  s.kind = Strategy::Kind::LocalMulticast;
  s.covers = covers;
  s.underlayAddress = std::move(underlay);
  s.stats.latency = latency;
  s.stats.available = std::all_of(covers.begin(), covers.end(),
                                  [this] (const Yni& n) { return m_reachable.at(n); });
  m_strategies.push_back(std::move(s));
  rebuildRows();
}

void
AcTable::setNeighborReachable(const Yni& neighbor, bool reachable)
{
  auto it = m_reachable.find(neighbor);
  if (it == m_reachable.end())
    return;
  it->second = reachable;
  for (auto& s : m_strategies) {
    if (s.covers.count(neighbor) == 0)
      continue;
    s.stats.available = std::all_of(s.covers.begin(), s.covers.end(),
                                    [this] (const Yni& n) { return m_reachable.at(n); });
  }
}

const std::vector<std::size_t>&
AcTable::row(const Yni& neighbor) const
{
  static const std::vector<std::size_t> EMPTY;
  auto it = m_rows.find(neighbor);
  return it == m_rows.end() ? EMPTY : it->second;
}

std::vector<Yni>
AcTable::neighbors() const
{
  std::vector<Yni> out;
  for (const auto& [n, idx] : m_rows)
    out.push_back(n);
  return out;
}

bool
AcTable::isReachable(const Yni& neighbor) const
{
  for (auto i : row(neighbor)) {
    if (m_strategies[i].stats.available)
      return true;
  }
  return false;
}

void
AcTable::rebuildRows()
{
  m_rows.clear();
  for (const auto& [n, up] : m_reachable)
    m_rows[n];
  for (std::size_t i = 0; i < m_strategies.size(); ++i) {
    for (const auto& n : m_strategies[i].covers)
      m_rows[n].push_back(i);
  }
}

static std::string
describe(const std::set<Yni>& ns)
{
  std::string s;
  for (const auto& n : ns) {
    if (!s.empty())
      s += ",";
    s += n.toString();
  }
  return s;
}

UncoverableNeighbor::UncoverableNeighbor(std::set<Yni> neighbors)
  : std::runtime_error("no available strategy reaches " + describe(neighbors))
  , m_neighbors(std::move(neighbors))
{
}

std::vector<PlanStep>
selectStrategies(const std::set<Yni>& required, AcTable& act)
{
  std::set<Yni> missing;
  std::set<std::size_t> candidates;
  for (const auto& n : required) {
    bool any = false;
    for (auto i : act.row(n)) {
      if (act.strategies()[i].stats.available) {
        candidates.insert(i);
        any = true;
      }
    }
    if (!any)
      missing.insert(n);
  }
  if (!missing.empty())
    throw UncoverableNeighbor(std::move(missing));

  std::set<Yni> uncovered = required;
  std::vector<PlanStep> plan;
  while (!uncovered.empty()) {
    std::size_t best = 0;
    std::set<Yni> bestCover;
    bool found = false;
    for (auto i : candidates) {
      const auto& s = act.strategies()[i];
      std::set<Yni> cover;
      std::set_intersection(s.covers.begin(), s.covers.end(), uncovered.begin(), uncovered.end(),
                            std::inserter(cover, cover.end()));
      if (cover.empty())
        continue;
      if (!found) {
        found = true;
        best = i;
        bestCover = std::move(cover);
        continue;
      }
      const auto& b = act.strategies()[best];
      bool better = false;
      if (cover.size() != bestCover.size())
        better = cover.size() > bestCover.size();
      else if (s.stats.latency != b.stats.latency)
        better = s.stats.latency < b.stats.latency;
      else if (*cover.begin() != *bestCover.begin())
        better = *cover.begin() < *bestCover.begin();
      if (better) {
        best = i;
        bestCover = std::move(cover);
      }
    }
    // every uncovered neighbor has an available candidate, so found holds
    for (const auto& n : bestCover)
      uncovered.erase(n);
    act.strategy(best).stats.uses++;
    plan.push_back({best, std::move(bestCover)});
  }
  return plan;
}

} // namespace yodel

#ifndef YODEL_STRATEGY_HPP
#define YODEL_STRATEGY_HPP

#include "yodel/trace.hpp"
#include "yodel/yni.hpp"

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace yodel {

/// An underlay delivery option toward one or more neighbors.
struct Strategy
{
  enum class Kind {
    Unicast,
    LocalMulticast,
  };

  struct Stats
  {
    std::uint64_t uses = 0;
    Tick latency = 0;
    bool available = true;
  };

  Kind kind = Kind::Unicast;
  std::set<Yni> covers;
  std::string underlayAddress;
  Stats stats;
};

/**
 * \brief Active Connection Table.
 *
 * One row per neighbor; each row lists the strategies able to reach that
 * neighbor. A local-multicast strategy appears in the row of every neighbor
 * it covers.
 */
class AcTable
{
public:
  /// Adds (or refreshes) a neighbor row with its unicast strategy.
  void
  addNeighbor(const Yni& neighbor, Tick latency, std::string underlay = {});

  /// Drops the neighbor row and every strategy covering it.
  void
  removeNeighbor(const Yni& neighbor);

  /// Registers a local-multicast strategy; @p covers must name at least two
  /// existing neighbors.
  void
  addMulticast(const std::set<Yni>& covers, Tick latency, std::string underlay = {});

  /// Marks strategies through @p neighbor available or not. Multicast
  /// strategies are available only when every covered neighbor is reachable.
  void
  setNeighborReachable(const Yni& neighbor, bool reachable);

  bool
  hasNeighbor(const Yni& neighbor) const
  {
    return m_rows.count(neighbor) > 0;
  }

  std::size_t
  rowCount() const
  {
    return m_rows.size();
  }

  /// Strategy indices listed in the neighbor's row.
  const std::vector<std::size_t>&
  row(const Yni& neighbor) const;

  const std::vector<Strategy>&
  strategies() const
  {
    return m_strategies;
  }

  Strategy&
  strategy(std::size_t index)
  {
    return m_strategies.at(index);
  }

  std::vector<Yni>
  neighbors() const;

  /// True when some available strategy reaches the neighbor.
  bool
  isReachable(const Yni& neighbor) const;

private:
  void
  rebuildRows();

private:
  std::map<Yni, std::vector<std::size_t>> m_rows;
  std::map<Yni, bool> m_reachable;
  std::vector<Strategy> m_strategies;
};

struct PlanStep
{
  std::size_t strategy;
  std::set<Yni> covered;
};

class UncoverableNeighbor : public std::runtime_error
{
public:
  explicit
  UncoverableNeighbor(std::set<Yni> neighbors);

  const std::set<Yni>&
  neighbors() const
  {
    return m_neighbors;
  }

private:
  std::set<Yni> m_neighbors;
};

/**
 * \brief Greedy minimum-transmission cover of @p required.
 *
 * Repeatedly takes the available strategy covering the most still-uncovered
 * neighbors; ties go to lower latency, then to the smaller first covered
 * YNI. Each required neighbor is covered exactly once. Increments the
 * usage counter of every chosen strategy.
 */
std::vector<PlanStep>
selectStrategies(const std::set<Yni>& required, AcTable& act);

} // namespace yodel

#endif // YODEL_STRATEGY_HPP

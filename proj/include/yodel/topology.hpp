#ifndef YODEL_TOPOLOGY_HPP
#define YODEL_TOPOLOGY_HPP

#include "yodel/codec.hpp"
#include "yodel/control-message.hpp"
#include "yodel/trace.hpp"

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace yodel {

enum class NodeRole : std::uint8_t {
  Edge = 1,
  Connector = 2,
};

std::string
toString(NodeRole role);

struct NodeStats
{
  double bandwidth = 100.0;
  double compute = 100.0;
  double storage = 100.0;
};

struct NodeInfo
{
  NodeRole role = NodeRole::Edge;
  std::string domain;
  NodeStats stats;
};

using LinkKey = std::pair<Yni, Yni>;

/// Orders the endpoints so (a,b) and (b,a) name the same undirected link.
inline LinkKey
makeLinkKey(const Yni& a, const Yni& b)
{
  return a < b ? LinkKey{a, b} : LinkKey{b, a};
}

/**
 * \brief Controller view of edge and connector nodes and their links.
 *
 * A link becomes visible once both endpoints have registered; mentions of an
 * unregistered neighbor are held pending. A node's re-registration is
 * authoritative for its incident links.
 */
class TopologyGraph
{
public:
  void
  registerNode(const Yni& yni, NodeRole role, const std::string& domain,
               const std::vector<NeighborEntry>& neighbors, const NodeStats& stats = {});

  bool
  hasNode(const Yni& yni) const
  {
    return m_nodes.count(yni) > 0;
  }

  const NodeInfo&
  node(const Yni& yni) const
  {
    return m_nodes.at(yni);
  }

  const std::map<Yni, NodeInfo>&
  nodes() const
  {
    return m_nodes;
  }

  const std::map<LinkKey, Tick>&
  links() const
  {
    return m_links;
  }

  bool
  hasLink(const Yni& a, const Yni& b) const
  {
    return m_links.count(makeLinkKey(a, b)) > 0;
  }

  std::size_t
  pendingLinkCount() const
  {
    return m_pending.size();
  }

  /// Neighbors of @p yni with link latency, ascending by YNI.
  std::vector<std::pair<Yni, Tick>>
  adjacency(const Yni& yni) const;

private:
  std::map<Yni, NodeInfo> m_nodes;
  std::map<LinkKey, Tick> m_links;
  /// (reporter, neighbor) -> latency, waiting for the neighbor to register
  std::map<std::pair<Yni, Yni>, Tick> m_pending;
};

/// Union-of-shortest-paths tree and the targets it could not reach.
struct TreeResult
{
  PathTree tree;
  std::set<Yni> unreachable;
};

/**
 * Builds the union of shortest paths from @p source to every target. Paths
 * are ranked by hop count, then total latency, then lexicographically by
 * their YNI sequence, which makes the union a tree and the result a pure
 * function of the graph.
 */
TreeResult
shortestPathTree(const TopologyGraph& graph, const Yni& source, const std::set<Yni>& targets);

class UnreachableConsumer : public std::runtime_error
{
public:
  explicit
  UnreachableConsumer(std::set<Yni> edges);

  const std::set<Yni>&
  edges() const
  {
    return m_edges;
  }

private:
  std::set<Yni> m_edges;
};

} // namespace yodel

#endif // YODEL_TOPOLOGY_HPP

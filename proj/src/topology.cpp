#include "yodel/topology.hpp"

#include <algorithm>

namespace yodel {

std::string
toString(NodeRole role)
{
  return role == NodeRole::Edge ? "edge" : "connector";
}

void
TopologyGraph::registerNode(const Yni& yni, NodeRole role, const std::string& domain,
                            const std::vector<NeighborEntry>& neighbors, const NodeStats& stats)
{
  bool first = m_nodes.count(yni) == 0;
  m_nodes[yni] = NodeInfo{role, domain, stats};

  std::map<Yni, Tick> listed;
  for (const auto& n : neighbors) {
    if (n.yni != yni)
      listed[n.yni] = n.latency;
  }

  if (!first) {
    std::erase_if(m_links, [&] (const auto& kv) {
      const auto& [a, b] = kv.first;
      if (a != yni && b != yni)
        return false;
      const Yni& other = a == yni ? b : a;
      return listed.count(other) == 0;
    });
    std::erase_if(m_pending, [&] (const auto& kv) {
      return kv.first.first == yni && listed.count(kv.first.second) == 0;
    });
  }
  else {
    // earlier mentions of this node by already-registered neighbors
    for (auto it = m_pending.begin(); it != m_pending.end();) {
      if (it->first.second == yni) {
        m_links[makeLinkKey(it->first.first, yni)] = it->second;
        it = m_pending.erase(it);
      }
      else {
        ++it;
      }
    }
  }

  for (const auto& [other, latency] : listed) {
    if (m_nodes.count(other) > 0)
      m_links[makeLinkKey(yni, other)] = latency;
    else
      m_pending[{yni, other}] = latency;
  }
}

std::vector<std::pair<Yni, Tick>>
TopologyGraph::adjacency(const Yni& yni) const
{
  std::vector<std::pair<Yni, Tick>> out;
  for (const auto& [key, latency] : m_links) {
    if (key.first == yni)
      out.emplace_back(key.second, latency);
    else if (key.second == yni)
      out.emplace_back(key.first, latency);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

struct Label
{
  std::size_t hops = 0;
  Tick latency = 0;
  std::vector<Yni> path;

  bool
  operator<(const Label& o) const
  {
    if (hops != o.hops)
      return hops < o.hops;
    if (latency != o.latency)
      return latency < o.latency;
    return path < o.path;
  }
};

PathTree*
findChild(PathTree& t, const Yni& y)
{
  for (auto& c : t.children) {
    if (c.yni == y)
      return &c;
  }
  return nullptr;
}

} // namespace

TreeResult
shortestPathTree(const TopologyGraph& graph, const Yni& source, const std::set<Yni>& targets)
{
  TreeResult result;
  result.tree.yni = source;

  std::map<Yni, Label> best;
  std::set<Yni> done;
  if (graph.hasNode(source))
    best[source] = Label{0, 0, {source}};

  while (true) {
    const Yni* next = nullptr;
    for (const auto& [y, label] : best) {
      if (done.count(y) > 0)
        continue;
      if (next == nullptr || label < best.at(*next))
        next = &y;
    }
    if (next == nullptr)
      break;
    Yni u = *next;
    done.insert(u);
    const Label& lu = best.at(u);
    for (const auto& [v, latency] : graph.adjacency(u)) {
      if (done.count(v) > 0)
        continue;
      Label cand{lu.hops + 1, lu.latency + latency, lu.path};
      cand.path.push_back(v);
      auto it = best.find(v);
      if (it == best.end() || cand < it->second)
        best[v] = std::move(cand);
    }
  }

  for (const auto& t : targets) {
    if (t == source)
      continue;
    auto it = best.find(t);
    if (it == best.end()) {
      result.unreachable.insert(t);
      continue;
    }
    PathTree* cursor = &result.tree;
    for (std::size_t i = 1; i < it->second.path.size(); ++i) {
      const Yni& hop = it->second.path[i];
      PathTree* child = findChild(*cursor, hop);
      if (child == nullptr) {
        cursor->children.push_back(PathTree{hop, {}});
        child = &cursor->children.back();
      }
      cursor = child;
    }
  }

  // canonical child order
  std::vector<PathTree*> stack{&result.tree};
  while (!stack.empty()) {
    PathTree* t = stack.back();
    stack.pop_back();
    std::sort(t->children.begin(), t->children.end(),
              [] (const PathTree& a, const PathTree& b) { return a.yni < b.yni; });
    for (auto& c : t->children)
      stack.push_back(&c);
  }
  return result;
}

static std::string
describeEdges(const std::set<Yni>& edges)
{
  std::string s;
  for (const auto& e : edges) {
    if (!s.empty())
      s += ",";
    s += e.toString();
  }
  return s;
}

UnreachableConsumer::UnreachableConsumer(std::set<Yni> edges)
  : std::runtime_error("unreachable consumer edges: " + describeEdges(edges))
  , m_edges(std::move(edges))
{
}

} // namespace yodel

#ifndef YODEL_TESTS_SUPPORT_GENERATORS_HPP
#define YODEL_TESTS_SUPPORT_GENERATORS_HPP

#include "yodel/codec.hpp"

#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

namespace yodel::test {

inline Yni
randomYni(std::mt19937_64& gen)
{
  Yni::Octets o;
  for (auto& b : o)
    b = static_cast<std::uint8_t>(gen());
  return Yni(o);
}

/// Loop-free tree with up to @p maxNodes nodes, built by attaching each new
/// node under a uniformly chosen existing one.
inline PathTree
randomTree(std::mt19937_64& gen, std::size_t maxNodes)
{
  std::size_t n = 1 + gen() % maxNodes;
  std::vector<Yni> ids;
  std::set<Yni> used;
  while (ids.size() < n) {
    auto y = randomYni(gen);
    if (used.insert(y).second)
      ids.push_back(y);
  }
  std::vector<std::vector<std::size_t>> children(n);
  for (std::size_t i = 1; i < n; ++i)
    children[gen() % i].push_back(i);
  std::function<PathTree(std::size_t)> build = [&] (std::size_t i) {
    PathTree t{ids[i], {}};
    for (auto c : children[i])
      t.children.push_back(build(c));
    return t;
  };
  return build(0);
}

inline Bytes
randomBytes(std::mt19937_64& gen, std::size_t maxLen)
{
  Bytes b(gen() % (maxLen + 1));
  for (auto& x : b)
    x = static_cast<std::uint8_t>(gen());
  return b;
}

/// A message satisfying every codec invariant, finalized.
inline YodelMessage
randomValidMessage(std::mt19937_64& gen)
{
  static const MessageKind kinds[] = {MessageKind::ControlYpp, MessageKind::DataYpp, MessageKind::DataYsync,
                                      MessageKind::AnycastDataYsync, MessageKind::AnycastDataYpp};
  YodelMessage m;
  m.fixed.kind = kinds[gen() % 5];
  m.fixed.sender = randomYni(gen);
  m.fixed.receiver = randomYni(gen);
  auto coin = [&] { return gen() % 2 == 0; };
  auto& f = m.floating;
  if (coin())
    f.valleyId = static_cast<std::uint32_t>(gen());
  if (coin())
    f.channelId = gen();
  if (m.fixed.kind == MessageKind::ControlYpp) {
    if (coin())
      f.namespaceId = static_cast<std::uint32_t>(gen());
    if (coin())
      f.applicationId = static_cast<std::uint32_t>(gen());
  }
  if (coin())
    f.metadata = randomBytes(gen, 24);
  if (isYsync(m.fixed.kind))
    f.pathTree = randomTree(gen, 12);
  m.data = randomBytes(gen, 64);
  m.finalize();
  return m;
}

/// Hex fixture text with '#' comment lines removed.
inline std::string
readFixture(const std::string& path)
{
  std::ifstream in(path);
  std::string line;
  std::string out;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#')
      out += line;
  }
  return out;
}

} // namespace yodel::test

#endif // YODEL_TESTS_SUPPORT_GENERATORS_HPP

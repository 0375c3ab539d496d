#ifndef YODEL_WORLD_HPP
#define YODEL_WORLD_HPP

#include "yodel/controller.hpp"
#include "yodel/topology.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace yodel {

class ParseError : public std::runtime_error
{
public:
  ParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what)
    , m_line(line)
  {
  }

  std::size_t
  line() const
  {
    return m_line;
  }

private:
  std::size_t m_line;
};

struct NodeDecl
{
  std::string name;
  NodeRole role = NodeRole::Edge;
  std::string domain;
  std::optional<MacAddress> mac;
  NodeStats stats;
  std::size_t line = 0;
};

struct LinkDecl
{
  std::string a;
  std::string b;
  Tick latency = 1;
  std::size_t line = 0;
};

struct McastGroupDecl
{
  std::string domain;
  std::vector<std::string> members;
  std::size_t line = 0;
};

struct HostDecl
{
  std::string name;
  std::string user;
  HostIntent intent;
  /// Pins the host to an edge instead of asking the controller.
  std::optional<std::string> edge;
  std::optional<MacAddress> mac;
  std::size_t line = 0;
};

/**
 * \brief Parsed topology file.
 *
 * Line-oriented: `domain <name>`, `node <name> edge|connector <domain>
 * [mac=..] [compute=..] [bandwidth=..] [storage=..]`, `link <a> <b>
 * <latency>`, `mcastgroup <domain> <node>+`, `host <name> <user>
 * [domain=..] [maxlat=..] [edge=..] [mac=..]`. `#` starts a comment.
 */
struct TopologySpec
{
  std::vector<std::string> domains;
  std::vector<NodeDecl> nodes;
  std::vector<LinkDecl> links;
  std::vector<McastGroupDecl> groups;
  std::vector<HostDecl> hosts;

  const NodeDecl*
  findNode(std::string_view name) const;

  const HostDecl*
  findHost(std::string_view name) const;

  bool
  hasLink(std::string_view a, std::string_view b) const;

  /// Throws ParseError on the first problem.
  static TopologySpec
  parse(std::string_view text);
};

struct ScenarioCommand
{
  Tick tick = 0;
  std::vector<std::string> words;
  std::size_t line = 0;

  const std::string&
  verb() const
  {
    return words.front();
  }

  /// Positional words after the verb, excluding key=value options.
  std::vector<std::string>
  args() const;

  /// Value of a key=value option.
  std::optional<std::string>
  option(std::string_view key) const;

  std::string
  text() const;
};

/**
 * \brief Parsed scenario file: `at <tick> <command> ...` lines.
 *
 * Commands keep file order; the syntax of each verb is checked here, the
 * names it refers to by validate().
 */
struct ScenarioSpec
{
  std::vector<ScenarioCommand> commands;

  static ScenarioSpec
  parse(std::string_view text);

  /// Parses a single command (without the `at <tick>` prefix).
  static ScenarioCommand
  parseCommand(Tick tick, std::string_view text, std::size_t line = 0);
};

struct Diagnostic
{
  std::string file;
  std::size_t line = 0;
  std::string message;

  std::string
  toString() const;
};

/// Cross-reference check of a scenario against a topology.
std::vector<Diagnostic>
validateScenario(const TopologySpec& topology, const ScenarioSpec& scenario);

std::optional<Role>
parseRole(std::string_view text);

} // namespace yodel

#endif // YODEL_WORLD_HPP

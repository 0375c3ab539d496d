#include "yodel/world.hpp"

#include "yodel/config.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

namespace yodel {

namespace {

std::vector<std::string>
tokenize(std::string_view line)
{
  auto hash = line.find('#');
  if (hash != std::string_view::npos)
    line = line.substr(0, hash);
  std::vector<std::string> words;
  std::istringstream is{std::string(line)};
  std::string w;
  while (is >> w)
    words.push_back(w);
  return words;
}

template<typename Fn>
void
forEachLine(std::string_view text, Fn&& fn)
{
  std::size_t lineNo = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos)
      end = text.size();
    ++lineNo;
    auto words = tokenize(text.substr(pos, end - pos));
    if (!words.empty())
      fn(lineNo, std::move(words));
    pos = end + 1;
  }
}

std::optional<std::uint64_t>
parseUnsigned(std::string_view s)
{
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    return std::nullopt;
  return v;
}

std::optional<double>
parseDouble(std::string_view s)
{
  try {
    std::size_t used = 0;
    double v = std::stod(std::string(s), &used);
    if (used != s.size())
      return std::nullopt;
    return v;
  }
  catch (const std::exception&) {
    return std::nullopt;
  }
}

std::optional<MacAddress>
parseMac(std::string_view s)
{
  MacAddress mac{};
  if (s.size() != 17)
    return std::nullopt;
  for (std::size_t i = 0; i < 6; ++i) {
    if (i > 0 && s[i * 3 - 1] != ':')
      return std::nullopt;
    auto part = s.substr(i * 3, 2);
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + 2, mac[i], 16);
    if (ec != std::errc() || ptr != part.data() + 2)
      return std::nullopt;
  }
  return mac;
}

bool
isOption(const std::string& w)
{
  return w.find('=') != std::string::npos;
}

std::pair<std::string, std::string>
splitOption(const std::string& w)
{
  auto eq = w.find('=');
  return {w.substr(0, eq), w.substr(eq + 1)};
}

struct VerbShape
{
  std::size_t minArgs;
  std::size_t maxArgs;
  std::set<std::string> options;
};

const std::map<std::string, VerbShape>&
verbShapes()
{
  static const std::map<std::string, VerbShape> shapes = {
    {"set", {2, 2, {}}},
    {"valley", {2, 2, {}}},
    {"member", {2, 2, {}}},
    {"namespace", {3, 5, {"admin"}}},
    {"grant", {3, 3, {}}},
    {"visibility", {3, 3, {}}},
    {"community", {3, 3, {}}},
    {"join", {6, 6, {"ttl"}}},
    {"leave", {6, 6, {}}},
    {"send", {5, 5, {"count", "every", "payload"}}},
    {"lock", {5, 5, {}}},
    {"unlock", {5, 5, {}}},
    {"fault", {2, 3, {}}},
    {"partition-now", {3, 3, {}}},
    {"report", {0, 0, {}}},
  };
  return shapes;
}

const std::map<std::string, std::size_t>&
faultTargets()
{
  static const std::map<std::string, std::size_t> kinds = {
    {"link-down", 2}, {"link-up", 2}, {"host-disconnect", 1}, {"host-reconnect", 1}, {"node-crash", 1},
  };
  return kinds;
}

void
checkCommand(const ScenarioCommand& cmd)
{
  auto fail = [&] (const std::string& what) { throw ParseError(cmd.line, what); };
  auto shape = verbShapes().find(cmd.verb());
  if (shape == verbShapes().end())
    fail("unknown command '" + cmd.verb() + "'");
  auto args = cmd.args();
  if (args.size() < shape->second.minArgs || args.size() > shape->second.maxArgs)
    fail("wrong number of arguments to '" + cmd.verb() + "'");
  for (std::size_t i = 1; i < cmd.words.size(); ++i) {
    if (!isOption(cmd.words[i]))
      continue;
    auto [key, value] = splitOption(cmd.words[i]);
    if (shape->second.options.count(key) == 0)
      fail("unknown option '" + key + "' for '" + cmd.verb() + "'");
    if ((key == "ttl" || key == "count" || key == "every") && !parseUnsigned(value))
      fail("option '" + key + "' needs an unsigned number");
  }
  const auto& verb = cmd.verb();
  if (verb == "set") {
    SimConfig probe;
    if (auto err = probe.set(args[0], args[1]))
      fail(*err);
  }
  else if (verb == "namespace") {
    if (!parseServiceModel(args[2]))
      fail("unknown service model '" + args[2] + "'");
    static const std::set<std::string> flags = {"open", "protected", "randomized", "dedicated"};
    for (std::size_t i = 3; i < args.size(); ++i) {
      if (flags.count(args[i]) == 0)
        fail("unknown namespace flag '" + args[i] + "'");
    }
  }
  else if (verb == "visibility") {
    if (args[2] != "open" && args[2] != "protected")
      fail("visibility must be open or protected");
  }
  else if (verb == "join" || verb == "leave") {
    if (!parseRole(args[5]))
      fail("unknown role '" + args[5] + "'");
  }
  else if (verb == "fault") {
    auto kind = faultTargets().find(args[0]);
    if (kind == faultTargets().end())
      fail("unknown fault '" + args[0] + "'");
    if (args.size() - 1 != kind->second)
      fail("fault '" + args[0] + "' takes " + std::to_string(kind->second) + " target(s)");
  }
}

} // namespace

std::optional<Role>
parseRole(std::string_view text)
{
  if (text == "producer")
    return Role::Producer;
  if (text == "consumer")
    return Role::Consumer;
  if (text == "member")
    return Role::Member;
  return std::nullopt;
}

const NodeDecl*
TopologySpec::findNode(std::string_view name) const
{
  for (const auto& n : nodes) {
    if (n.name == name)
      return &n;
  }
  return nullptr;
}

const HostDecl*
TopologySpec::findHost(std::string_view name) const
{
  for (const auto& h : hosts) {
    if (h.name == name)
      return &h;
  }
  return nullptr;
}

bool
TopologySpec::hasLink(std::string_view a, std::string_view b) const
{
  return std::any_of(links.begin(), links.end(), [&] (const LinkDecl& l) {
    return (l.a == a && l.b == b) || (l.a == b && l.b == a);
  });
}

TopologySpec
TopologySpec::parse(std::string_view text)
{
  TopologySpec spec;
  std::set<std::string> names;
  auto claim = [&] (std::size_t line, const std::string& name) {
    if (!names.insert(name).second)
      throw ParseError(line, "duplicate name '" + name + "'");
  };
  auto knownDomain = [&] (std::size_t line, const std::string& d) {
    if (std::find(spec.domains.begin(), spec.domains.end(), d) == spec.domains.end())
      throw ParseError(line, "unknown domain '" + d + "'");
  };

  forEachLine(text, [&] (std::size_t line, std::vector<std::string> w) {
    const auto& kw = w[0];
    if (kw == "domain") {
      if (w.size() != 2)
        throw ParseError(line, "usage: domain <name>");
      if (std::find(spec.domains.begin(), spec.domains.end(), w[1]) != spec.domains.end())
        throw ParseError(line, "duplicate domain '" + w[1] + "'");
      spec.domains.push_back(w[1]);
    }
    else if (kw == "node") {
      if (w.size() < 4)
        throw ParseError(line, "usage: node <name> edge|connector <domain> [options]");
      NodeDecl n;
      n.name = w[1];
      n.line = line;
      if (w[2] == "edge")
        n.role = NodeRole::Edge;
      else if (w[2] == "connector")
        n.role = NodeRole::Connector;
      else
        throw ParseError(line, "node role must be edge or connector");
      knownDomain(line, w[3]);
      n.domain = w[3];
      for (std::size_t i = 4; i < w.size(); ++i) {
        if (!isOption(w[i]))
          throw ParseError(line, "unexpected '" + w[i] + "'");
        auto [key, value] = splitOption(w[i]);
        if (key == "mac") {
          n.mac = parseMac(value);
          if (!n.mac)
            throw ParseError(line, "bad mac '" + value + "'");
          continue;
        }
        auto v = parseDouble(value);
        if (!v || *v < 0)
          throw ParseError(line, "bad value for '" + key + "'");
        if (key == "compute")
          n.stats.compute = *v;
        else if (key == "bandwidth")
          n.stats.bandwidth = *v;
        else if (key == "storage")
          n.stats.storage = *v;
        else
          throw ParseError(line, "unknown node option '" + key + "'");
      }
      claim(line, n.name);
      spec.nodes.push_back(std::move(n));
    }
    else if (kw == "link") {
      if (w.size() != 4)
        throw ParseError(line, "usage: link <a> <b> <latency>");
      auto lat = parseUnsigned(w[3]);
      if (!lat)
        throw ParseError(line, "bad latency '" + w[3] + "'");
      for (const auto& end : {w[1], w[2]}) {
        if (!spec.findNode(end))
          throw ParseError(line, "link refers to unknown node '" + end + "'");
      }
      if (w[1] == w[2])
        throw ParseError(line, "link from a node to itself");
      if (spec.hasLink(w[1], w[2]))
        throw ParseError(line, "duplicate link " + w[1] + " " + w[2]);
      spec.links.push_back({w[1], w[2], *lat, line});
    }
    else if (kw == "mcastgroup") {
      if (w.size() < 4)
        throw ParseError(line, "usage: mcastgroup <domain> <node> <node>+");
      knownDomain(line, w[1]);
      McastGroupDecl g{w[1], {w.begin() + 2, w.end()}, line};
      for (const auto& m : g.members) {
        const auto* n = spec.findNode(m);
        if (!n)
          throw ParseError(line, "multicast group refers to unknown node '" + m + "'");
        if (n->domain != g.domain)
          throw ParseError(line, "node '" + m + "' is not in domain '" + g.domain + "'");
      }
      spec.groups.push_back(std::move(g));
    }
    else if (kw == "host") {
      if (w.size() < 3)
        throw ParseError(line, "usage: host <name> <user> [options]");
      HostDecl h;
      h.name = w[1];
      h.user = w[2];
      h.line = line;
      for (std::size_t i = 3; i < w.size(); ++i) {
        if (!isOption(w[i]))
          throw ParseError(line, "unexpected '" + w[i] + "'");
        auto [key, value] = splitOption(w[i]);
        if (key == "domain") {
          knownDomain(line, value);
          h.intent.preferredDomain = value;
        }
        else if (key == "maxlat") {
          auto v = parseUnsigned(value);
          if (!v)
            throw ParseError(line, "bad maxlat '" + value + "'");
          h.intent.maxLatency = *v;
        }
        else if (key == "edge") {
          const auto* n = spec.findNode(value);
          if (!n || n->role != NodeRole::Edge)
            throw ParseError(line, "unknown edge '" + value + "'");
          h.edge = value;
        }
        else if (key == "mac") {
          h.mac = parseMac(value);
          if (!h.mac)
            throw ParseError(line, "bad mac '" + value + "'");
        }
        else {
          throw ParseError(line, "unknown host option '" + key + "'");
        }
      }
      claim(line, h.name);
      spec.hosts.push_back(std::move(h));
    }
    else {
      throw ParseError(line, "unknown keyword '" + kw + "'");
    }
  });
  return spec;
}

std::vector<std::string>
ScenarioCommand::args() const
{
  std::vector<std::string> out;
  for (std::size_t i = 1; i < words.size(); ++i) {
    if (!isOption(words[i]))
      out.push_back(words[i]);
  }
  return out;
}

std::optional<std::string>
ScenarioCommand::option(std::string_view key) const
{
  for (std::size_t i = 1; i < words.size(); ++i) {
    if (!isOption(words[i]))
      continue;
    auto [k, v] = splitOption(words[i]);
    if (k == key)
      return v;
  }
  return std::nullopt;
}

std::string
ScenarioCommand::text() const
{
  std::string out;
  for (const auto& w : words) {
    if (!out.empty())
      out += ' ';
    out += w;
  }
  return out;
}

ScenarioCommand
ScenarioSpec::parseCommand(Tick tick, std::string_view text, std::size_t line)
{
  ScenarioCommand cmd;
  cmd.tick = tick;
  cmd.line = line;
  cmd.words = tokenize(text);
  if (cmd.words.empty())
    throw ParseError(line, "empty command");
  checkCommand(cmd);
  return cmd;
}

ScenarioSpec
ScenarioSpec::parse(std::string_view text)
{
  ScenarioSpec spec;
  forEachLine(text, [&] (std::size_t line, std::vector<std::string> w) {
    if (w[0] != "at" || w.size() < 3)
      throw ParseError(line, "expected 'at <tick> <command>'");
    auto tick = parseUnsigned(w[1]);
    if (!tick)
      throw ParseError(line, "bad tick '" + w[1] + "'");
    ScenarioCommand cmd;
    cmd.tick = *tick;
    cmd.line = line;
    cmd.words.assign(w.begin() + 2, w.end());
    checkCommand(cmd);
    spec.commands.push_back(std::move(cmd));
  });
  return spec;
}

std::string
Diagnostic::toString() const
{
  return file + ":" + std::to_string(line) + ": " + message;
}

std::vector<Diagnostic>
validateScenario(const TopologySpec& topology, const ScenarioSpec& scenario)
{
  std::vector<Diagnostic> out;
  auto report = [&] (const ScenarioCommand& cmd, const std::string& what) {
    out.push_back({"", cmd.line, what});
  };
  auto needHost = [&] (const ScenarioCommand& cmd, const std::string& name) {
    if (!topology.findHost(name))
      report(cmd, "unknown host '" + name + "'");
  };

  for (const auto& cmd : scenario.commands) {
    auto args = cmd.args();
    const auto& verb = cmd.verb();
    if (verb == "join" || verb == "leave" || verb == "send" || verb == "lock" || verb == "unlock") {
      needHost(cmd, args[0]);
    }
    else if (verb == "fault") {
      const auto& kind = args[0];
      if (kind == "host-disconnect" || kind == "host-reconnect") {
        needHost(cmd, args[1]);
      }
      else if (kind == "node-crash") {
        if (!topology.findNode(args[1]) && !topology.findHost(args[1]))
          report(cmd, "unknown node '" + args[1] + "'");
      }
      else {
        for (std::size_t i = 1; i <= 2; ++i) {
          if (!topology.findNode(args[i]))
            report(cmd, "unknown node '" + args[i] + "'");
        }
        if (topology.findNode(args[1]) && topology.findNode(args[2]) && !topology.hasLink(args[1], args[2]))
          report(cmd, "no link between '" + args[1] + "' and '" + args[2] + "'");
      }
    }
  }
  return out;
}

} // namespace yodel

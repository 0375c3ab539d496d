#include "yodel/cli.hpp"

#include "yodel/sim.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace yodel {

std::string
readFile(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::ios_base::failure("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

void
writeFile(const std::filesystem::path& path, const std::string& text)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw std::ios_base::failure("cannot write '" + path.string() + "'");
  out << text;
  out.flush();
  if (!out)
    throw std::ios_base::failure("write failed for '" + path.string() + "'");
}

std::vector<std::string>
splitLines(const std::string& text)
{
  std::vector<std::string> lines;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line))
    lines.push_back(line);
  return lines;
}

} // namespace

TraceDiff
diffTraces(const std::string& a, const std::string& b)
{
  auto la = splitLines(a);
  auto lb = splitLines(b);
  TraceDiff d;
  std::size_t n = std::min(la.size(), lb.size());
  std::size_t i = 0;
  while (i < n && la[i] == lb[i])
    ++i;
  if (i == la.size() && i == lb.size() && a.size() == b.size())
    return d;
  d.equal = false;
  d.line = i + 1;
  if (i < la.size())
    d.left = la[i];
  if (i < lb.size())
    d.right = lb[i];
  if (i > 0)
    d.context = la[i - 1];
  return d;
}

std::vector<Diagnostic>
validateFiles(const std::string& topologyPath, const std::string& scenarioPath)
{
  std::vector<Diagnostic> out;
  std::optional<TopologySpec> topology;
  std::optional<ScenarioSpec> scenario;
  try {
    topology = TopologySpec::parse(readFile(topologyPath));
  }
  catch (const ParseError& e) {
    out.push_back({topologyPath, e.line(), e.what()});
  }
  try {
    scenario = ScenarioSpec::parse(readFile(scenarioPath));
  }
  catch (const ParseError& e) {
    out.push_back({scenarioPath, e.line(), e.what()});
  }
  if (topology && scenario) {
    for (auto d : validateScenario(*topology, *scenario)) {
      d.file = scenarioPath;
      out.push_back(std::move(d));
    }
  }
  return out;
}

int
cmdValidate(const std::string& topologyPath, const std::string& scenarioPath, std::ostream& out, std::ostream& err)
{
  std::vector<Diagnostic> diags;
  try {
    diags = validateFiles(topologyPath, scenarioPath);
  }
  catch (const std::ios_base::failure& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::IO;
  }
  for (const auto& d : diags)
    err << d.toString() << "\n";
  if (!diags.empty())
    return exit_code::PROTOCOL_ERRORS;
  out << "ok\n";
  return exit_code::CLEAN;
}

int
cmdRun(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
  std::string topologyText;
  std::string scenarioText;
  try {
    topologyText = readFile(cfg.topologyPath);
    scenarioText = readFile(cfg.scenarioPath);
  }
  catch (const std::ios_base::failure& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::IO;
  }

  std::optional<TopologySpec> topology;
  std::optional<ScenarioSpec> scenario;
  try {
    topology = TopologySpec::parse(topologyText);
  }
  catch (const ParseError& e) {
    err << cfg.topologyPath << ":" << e.line() << ": " << e.what() << "\n";
    return exit_code::USAGE;
  }
  try {
    scenario = ScenarioSpec::parse(scenarioText);
  }
  catch (const ParseError& e) {
    err << cfg.scenarioPath << ":" << e.line() << ": " << e.what() << "\n";
    return exit_code::USAGE;
  }
  auto diags = validateScenario(*topology, *scenario);
  if (!diags.empty()) {
    for (auto& d : diags) {
      d.file = cfg.scenarioPath;
      err << d.toString() << "\n";
    }
    return exit_code::USAGE;
  }

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.outDir, ec);
  if (ec || !fs::is_directory(cfg.outDir)) {
    err << "error: cannot create output directory '" << cfg.outDir << "'\n";
    return exit_code::IO;
  }

  SimConfig config;
  config.seed = cfg.seed;
  RunResult result;
  try {
    result = runScenario(*topology, *scenario, config, cfg.until);
  }
  catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::USAGE;
  }

  try {
    if (cfg.report != ReportFormat::Metrics)
      writeFile(fs::path(cfg.outDir) / "trace.txt", result.trace);
    if (cfg.report != ReportFormat::Trace)
      writeFile(fs::path(cfg.outDir) / "metrics.json", result.metrics);
  }
  catch (const std::ios_base::failure& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::IO;
  }

  out << "protocol errors: " << result.protocolErrors << "\n";
  for (const auto& v : result.conservationViolations)
    out << "conservation violated: " << v << "\n";
  return result.protocolErrors > 0 || !result.conservationViolations.empty() ? exit_code::PROTOCOL_ERRORS
                                                                             : exit_code::CLEAN;
}

int
cmdDiff(const std::string& a, const std::string& b, std::ostream& out, std::ostream& err)
{
  std::string ta;
  std::string tb;
  try {
    ta = readFile(a);
    tb = readFile(b);
  }
  catch (const std::ios_base::failure& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::IO;
  }
  auto d = diffTraces(ta, tb);
  if (d.equal) {
    out << "identical\n";
    return exit_code::CLEAN;
  }
  out << "first divergence at line " << d.line << "\n";
  if (d.context)
    out << "  " << *d.context << "\n";
  out << "- " << (d.left ? *d.left : "<EOF " + a + ">") << "\n";
  out << "+ " << (d.right ? *d.right : "<EOF " + b + ">") << "\n";
  return exit_code::PROTOCOL_ERRORS;
}

int
runCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Yodel simulator"};
  app.require_subcommand(1);

  std::string topologyPath;
  std::string scenarioPath;
  auto* validate = app.add_subcommand("validate", "Check a topology and scenario");
  validate->add_option("--topology", topologyPath)->required();
  validate->add_option("--scenario", scenarioPath)->required();

  RunConfig cfg;
  std::optional<std::uint64_t> seed;
  std::string report = "both";
  auto* run = app.add_subcommand("run", "Run a scenario and write trace and metrics");
  run->add_option("--topology", cfg.topologyPath)->required();
  run->add_option("--scenario", cfg.scenarioPath)->required();
  run->add_option("--seed", seed, "falls back to YODEL_SIM_SEED");
  run->add_option("--until", cfg.until)->required();
  run->add_option("--out", cfg.outDir)->required();
  run->add_option("--report", report)->check(CLI::IsMember({"trace", "metrics", "both"}));

  std::string traceA;
  std::string traceB;
  auto* diff = app.add_subcommand("diff", "Compare two trace files");
  diff->add_option("trace_a", traceA)->required();
  diff->add_option("trace_b", traceB)->required();

  try {
    app.parse(argc, argv);
  }
  catch (const CLI::CallForHelp& e) {
    out << app.help();
    return exit_code::CLEAN;
  }
  catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return exit_code::USAGE;
  }

  if (*validate)
    return cmdValidate(topologyPath, scenarioPath, out, err);
  if (*diff)
    return cmdDiff(traceA, traceB, out, err);

  if (!seed) {
    const char* env = std::getenv("YODEL_SIM_SEED");
    if (!env) {
      err << "run needs --seed or YODEL_SIM_SEED\n";
      return exit_code::USAGE;
    }
    try {
      std::size_t used = 0;
      seed = std::stoull(env, &used);
      if (env[used] != '\0')
        throw std::invalid_argument(env);
    }
    catch (const std::exception&) {
      err << "YODEL_SIM_SEED is not an unsigned number\n";
      return exit_code::USAGE;
    }
  }
  cfg.seed = *seed;
  cfg.report = report == "trace" ? ReportFormat::Trace : report == "metrics" ? ReportFormat::Metrics : ReportFormat::Both;
  return cmdRun(cfg, out, err);
}

} // namespace yodel

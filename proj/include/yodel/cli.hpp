#ifndef YODEL_CLI_HPP
#define YODEL_CLI_HPP

#include "yodel/world.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace yodel {

namespace exit_code {
inline constexpr int CLEAN = 0;
inline constexpr int PROTOCOL_ERRORS = 1;
inline constexpr int USAGE = 2;
inline constexpr int IO = 3;
} // namespace exit_code

enum class ReportFormat {
  Trace,
  Metrics,
  Both,
};

struct RunConfig
{
  std::string topologyPath;
  std::string scenarioPath;
  std::uint64_t seed = 0;
  Tick until = 0;
  std::string outDir;
  ReportFormat report = ReportFormat::Both;
};

/// Outcome of comparing two trace files.
struct TraceDiff
{
  bool equal = true;
  /// 1-based line of the first divergence
  std::size_t line = 0;
  std::optional<std::string> left;
  std::optional<std::string> right;
  /// the line before the divergence, if any
  std::optional<std::string> context;
};

TraceDiff
diffTraces(const std::string& a, const std::string& b);

/// Reads a whole file; throws std::ios_base::failure.
std::string
readFile(const std::string& path);

/// Parses both files and cross-checks them; empty result means valid.
std::vector<Diagnostic>
validateFiles(const std::string& topologyPath, const std::string& scenarioPath);

int
cmdValidate(const std::string& topologyPath, const std::string& scenarioPath, std::ostream& out, std::ostream& err);

int
cmdRun(const RunConfig& cfg, std::ostream& out, std::ostream& err);

int
cmdDiff(const std::string& a, const std::string& b, std::ostream& out, std::ostream& err);

/// Entry point of the yodel-sim tool.
int
runCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace yodel

#endif // YODEL_CLI_HPP

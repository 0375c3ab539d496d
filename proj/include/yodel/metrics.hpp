#ifndef YODEL_METRICS_HPP
#define YODEL_METRICS_HPP

#include "yodel/topology.hpp"
#include "yodel/trace.hpp"
#include "yodel/yni.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace yodel {

struct LinkCounters
{
  std::uint64_t sends = 0;
  std::uint64_t receives = 0;
  std::uint64_t lost = 0;
};

/// Counters collected over one simulation run.
struct Metrics
{
  std::map<LinkKey, LinkCounters> links;
  /// One entry per strategy use, keyed "domain:<D>" when the sender and every
  /// covered receiver sit in domain D, "inter:<A>-><B>" otherwise.
  std::map<std::string, std::uint64_t> transmissions;
  std::map<Yni, std::uint64_t> deliveries;
  std::map<Yni, std::uint64_t> drops;
  /// "<edge>|<valley>/<namespace>/<community>|<role>" -> visits
  std::map<std::string, std::uint64_t> controllerVisits;
  std::uint64_t controllerMessages = 0;
  /// end-to-end latency in ticks -> deliveries
  std::map<Tick, std::uint64_t> latencyHistogram;
  /// edge -> largest twin buffer seen
  std::map<Yni, std::uint64_t> bufferPeaks;
  std::uint64_t protocolErrors = 0;

  std::uint64_t
  domainTransmissions(const std::string& domain) const
  {
    auto it = transmissions.find("domain:" + domain);
    return it == transmissions.end() ? 0 : it->second;
  }
};

} // namespace yodel

#endif // YODEL_METRICS_HPP

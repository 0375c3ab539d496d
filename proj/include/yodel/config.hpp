#ifndef YODEL_CONFIG_HPP
#define YODEL_CONFIG_HPP

#include "yodel/trace.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace yodel {

/// Tunables shared by every node of a simulation run.
struct SimConfig
{
  std::uint64_t seed = 0;
  Tick controllerLatency = 1;
  Tick hostLinkLatency = 1;
  /// Per-stage survival probability for randomized anycast.
  double pDeliver = 1.0;
  /// Partition single-source flows with several producer edges.
  bool partitioning = true;
  /// Ticks between twin syncs; 0 disables syncing (and twin expiry).
  Tick twinSyncPeriod = 10;
  /// Consecutive missed syncs before a host is declared unreachable.
  std::uint32_t twinThreshold = 3;
  /// HAT timer length, measured from the last time the host was heard.
  Tick twinTimeout = 200;
  /// Maximum buffered messages per twin; 0 means unbounded. Oldest dropped.
  std::size_t twinBufferMax = 0;
  /// Timestamp part of every generated YNI.
  std::uint32_t epoch = 1700000000;

  /// Applies a scenario `set` key. Returns an error message on failure.
  std::optional<std::string>
  set(const std::string& key, const std::string& value);
};

} // namespace yodel

#endif // YODEL_CONFIG_HPP

#ifndef YODEL_SERVICES_HPP
#define YODEL_SERVICES_HPP

#include "yodel/model.hpp"
#include "yodel/rng.hpp"
#include "yodel/service-model.hpp"
#include "yodel/yni.hpp"

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

namespace yodel {

class PreconditionViolation : public std::logic_error
{
public:
  using std::logic_error::logic_error;
};

/// What the caller knows about the producer scope (flow or partition) when a
/// producer joins.
struct ProducerAdmission
{
  /// The edge already holds a producer role in the scope.
  bool edgeKnown = false;
  /// The edge's producer row is unlocked.
  bool edgeActive = false;
  /// The edge already has an unlocked producer application.
  bool edgeHasActiveProducer = false;
  /// Some other edge in the scope is the active producer edge.
  bool scopeHasActiveEdge = false;
};

struct LockDirectives
{
  bool lockHostRow = false;
  bool lockEdgeRow = false;

  friend bool operator==(const LockDirectives&, const LockDirectives&) = default;
};

/**
 * Lock decision for a joining producer. Single-source variants keep one
 * active producer per scope: the first producer is active, later producers on
 * the same edge get a host-row lock and producers on a new edge lock the edge
 * row as well. Multi-source variants never lock.
 */
LockDirectives
admitProducer(ServiceModel model, const ProducerAdmission& state);

using ProducerKey = std::pair<Yni, ApplicationId>;

/// Local successor after the active producer of an edge goes away: the lowest
/// (host YNI, application ID).
std::optional<ProducerKey>
nextLocalProducer(const std::set<ProducerKey>& onHold);

/// Flow-level successor: the lowest-YNI inactive producer edge.
std::optional<Yni>
nextProducerEdge(const std::map<Yni, bool>& producerEdges);

/// A disjoint subgroup of a partitioned flow, served by its own channel.
struct Partition
{
  ChannelId channel = 0;
  std::optional<Yni> producerEdge;
  std::set<Yni> consumerEdges;

  friend bool operator==(const Partition&, const Partition&) = default;
};

using ChannelAllocator = std::function<ChannelId()>;

struct PartitionPlan
{
  std::vector<Partition> partitions;
  /// consumer edge -> (old channel, new channel), only for edges that moved
  std::map<Yni, std::pair<ChannelId, ChannelId>> consumerMoves;
  /// producer edges whose partition got a new channel
  std::map<Yni, ChannelId> producerChannels;
};

/**
 * Index of the partition a consumer edge joins: the partition whose producer
 * edge is the same node if any, otherwise the one with the fewest consumers
 * (ties to the lower producer-edge YNI; partitions with a producer are
 * preferred over idle ones).
 */
std::size_t
choosePartition(const std::vector<Partition>& partitions, const Yni& consumerEdge);

/**
 * One partition per producer edge. Partitions whose producer edge is still
 * present keep their channel ID; every new partition gets a fresh ID from
 * @p alloc. Consumer edges are reassigned with choosePartition, visiting
 * them in ascending YNI order.
 *
 * Throws PreconditionViolation unless @p model partitions.
 */
PartitionPlan
partitionFlow(ServiceModel model, const std::vector<Partition>& current,
              const std::set<Yni>& producerEdges, const std::set<Yni>& consumerEdges,
              const ChannelAllocator& alloc);

struct MergePlan
{
  std::size_t survivor = 0;
  /// consumer edges of the dying partition, all moving to the survivor
  std::set<Yni> moved;
  ChannelId retired = 0;
};

/**
 * Folds @p dying into another partition and removes it from @p partitions.
 * Returns nullopt when @p dying is the last partition, which is kept.
 */
std::optional<MergePlan>
mergePartition(std::vector<Partition>& partitions, std::size_t dying);

enum class AnycastStage {
  Host,
  Edge,
  Connector,
};

/**
 * Selects recipients for an anycast message.
 *
 * Dedicated mode drops locked candidates and draws nothing. Randomized mode
 * at the host stage picks exactly one unlocked candidate uniformly; at the
 * edge and connector stages each unlocked candidate survives independently
 * with probability pDeliver. pDeliver >= 1 degenerates to the base service
 * (all unlocked candidates).
 */
std::vector<std::size_t>
anycastFilter(AnycastStage stage, const std::vector<bool>& locked, const AnycastMode& mode, Rng& rng);

/// Consumers lock themselves only in anycast communities.
constexpr bool
consumerMayLock(ServiceModel model)
{
  return isAnycast(model);
}

} // namespace yodel

#endif // YODEL_SERVICES_HPP

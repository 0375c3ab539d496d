#include "yodel/services.hpp"

#include <algorithm>

namespace yodel {

LockDirectives
admitProducer(ServiceModel model, const ProducerAdmission& state)
{
  if (!isSingleSource(model))
    return {false, false};

  if (!state.edgeKnown) {
    if (state.scopeHasActiveEdge)
      return {true, true};
    return {false, false};
  }
  if (!state.edgeActive)
    return {true, true};
  if (state.edgeHasActiveProducer)
    return {true, false};
  return {false, false};
}

std::optional<ProducerKey>
nextLocalProducer(const std::set<ProducerKey>& onHold)
{
  if (onHold.empty())
    return std::nullopt;
  return *onHold.begin();
}

std::optional<Yni>
nextProducerEdge(const std::map<Yni, bool>& producerEdges)
{
  for (const auto& [edge, active] : producerEdges) {
    if (!active)
      return edge;
  }
  return std::nullopt;
}

std::size_t
choosePartition(const std::vector<Partition>& partitions, const Yni& consumerEdge)
{
  if (partitions.empty())
    throw PreconditionViolation("flow has no partitions");

  for (std::size_t i = 0; i < partitions.size(); ++i) {
    if (partitions[i].producerEdge == consumerEdge)
      return i;
  }

  bool anyProducer = std::any_of(partitions.begin(), partitions.end(),
                                 [] (const Partition& p) { return p.producerEdge.has_value(); });
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < partitions.size(); ++i) {
    const auto& p = partitions[i];
    if (anyProducer && !p.producerEdge)
      continue;
    if (!best) {
      best = i;
      continue;
    }
    const auto& b = partitions[*best];
    if (p.consumerEdges.size() != b.consumerEdges.size()) {
      if (p.consumerEdges.size() < b.consumerEdges.size())
        best = i;
    }
    else if (p.producerEdge < b.producerEdge) {
      best = i;
    }
  }
  return *best;
}

PartitionPlan
partitionFlow(ServiceModel model, const std::vector<Partition>& current,
              const std::set<Yni>& producerEdges, const std::set<Yni>& consumerEdges,
              const ChannelAllocator& alloc)
{
  if (!isPartitioned(model))
    throw PreconditionViolation(std::string("service ") + std::string(toString(model)) +
                                " does not partition");

  PartitionPlan plan;
  std::map<Yni, ChannelId> oldConsumerChannel;
  std::vector<const Partition*> idle;
  for (const auto& p : current) {
    for (const auto& c : p.consumerEdges)
      oldConsumerChannel[c] = p.channel;
    if (p.producerEdge && producerEdges.count(*p.producerEdge) > 0)
      plan.partitions.push_back({p.channel, p.producerEdge, {}});
    else
      idle.push_back(&p);
  }

  std::size_t idleUsed = 0;
  for (const auto& producer : producerEdges) {
    bool present = std::any_of(plan.partitions.begin(), plan.partitions.end(),
                               [&] (const Partition& p) { return p.producerEdge == producer; });
    if (present)
      continue;
    ChannelId channel;
    if (idleUsed < idle.size()) {
      // an idle partition (e.g. the flow's first channel) is reused before
      // allocating a fresh ID
      channel = idle[idleUsed++]->channel;
    }
    else {
      channel = alloc();
    }
    plan.partitions.push_back({channel, producer, {}});
    plan.producerChannels[producer] = channel;
  }
  if (plan.partitions.empty()) {
    // no producer: keep a single idle partition on the oldest channel
    ChannelId channel = current.empty() ? alloc() : current.front().channel;
    plan.partitions.push_back({channel, std::nullopt, {}});
  }
  std::sort(plan.partitions.begin(), plan.partitions.end(),
            [] (const Partition& a, const Partition& b) { return a.channel < b.channel; });

  for (const auto& c : consumerEdges) {
    auto i = choosePartition(plan.partitions, c);
    plan.partitions[i].consumerEdges.insert(c);
    auto it = oldConsumerChannel.find(c);
    if (it != oldConsumerChannel.end() && it->second != plan.partitions[i].channel)
      plan.consumerMoves[c] = {it->second, plan.partitions[i].channel};
  }
  return plan;
}

std::optional<MergePlan>
mergePartition(std::vector<Partition>& partitions, std::size_t dying)
{
  if (partitions.size() <= 1)
    return std::nullopt;

  Partition gone = partitions.at(dying);
  partitions.erase(partitions.begin() + static_cast<std::ptrdiff_t>(dying));

  MergePlan plan;
  plan.retired = gone.channel;
  plan.moved = gone.consumerEdges;
  // the survivor is picked like a consumer's partition
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < partitions.size(); ++i) {
    if (!best) {
      best = i;
      continue;
    }
    const auto& p = partitions[i];
    const auto& b = partitions[*best];
    if (p.producerEdge.has_value() != b.producerEdge.has_value()) {
      if (p.producerEdge)
        best = i;
    }
    else if (p.consumerEdges.size() != b.consumerEdges.size()) {
      if (p.consumerEdges.size() < b.consumerEdges.size())
        best = i;
    }
    else if (p.producerEdge < b.producerEdge) {
      best = i;
    }
  }
  plan.survivor = *best;
  partitions[plan.survivor].consumerEdges.insert(gone.consumerEdges.begin(), gone.consumerEdges.end());
  return plan;
}

std::vector<std::size_t>
anycastFilter(AnycastStage stage, const std::vector<bool>& locked, const AnycastMode& mode, Rng& rng)
{
  std::vector<std::size_t> unlocked;
  for (std::size_t i = 0; i < locked.size(); ++i) {
    if (!locked[i])
      unlocked.push_back(i);
  }
  if (!mode.isRandomized() || mode.pDeliver >= 1.0)
    return unlocked;

  if (stage == AnycastStage::Host) {
    if (unlocked.empty())
      return {};
    return {unlocked[rng.below(unlocked.size())]};
  }

  std::vector<std::size_t> kept;
  for (auto i : unlocked) {
    if (rng.bernoulli(mode.pDeliver))
      kept.push_back(i);
  }
  return kept;
}

} // namespace yodel

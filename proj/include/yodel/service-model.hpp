#ifndef YODEL_SERVICE_MODEL_HPP
#define YODEL_SERVICE_MODEL_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace yodel {

/// The seven multicast service variants.
enum class ServiceModel : std::uint8_t {
  SSM = 1,
  AC = 2,
  SLSM = 3,
  SLAC = 4,
  MSM = 5,
  MSAC = 6,
  MMM = 7,
};

inline constexpr std::array<ServiceModel, 7> ALL_SERVICE_MODELS = {
  ServiceModel::SSM, ServiceModel::AC, ServiceModel::SLSM, ServiceModel::SLAC,
  ServiceModel::MSM, ServiceModel::MSAC, ServiceModel::MMM,
};

enum class Multiplicity : std::uint8_t {
  One,
  OneOrMore,
};

enum class ChannelSourceType : std::uint8_t {
  Single,
  Multi,
};

/// One row of the service comparison table.
struct ServiceAttributes
{
  Multiplicity activeProducerEdges;
  Multiplicity channelsPerFlow;
  ChannelSourceType channelType;
  bool partitioning;

  friend bool operator==(const ServiceAttributes&, const ServiceAttributes&) = default;
};

constexpr ServiceAttributes
attributesOf(ServiceModel model)
{
  switch (model) {
  case ServiceModel::SSM:
  case ServiceModel::AC:
    return {Multiplicity::One, Multiplicity::One, ChannelSourceType::Single, false};
  case ServiceModel::SLSM:
  case ServiceModel::SLAC:
    return {Multiplicity::OneOrMore, Multiplicity::OneOrMore, ChannelSourceType::Single, true};
  case ServiceModel::MSM:
  case ServiceModel::MSAC:
  case ServiceModel::MMM:
    return {Multiplicity::OneOrMore, Multiplicity::OneOrMore, ChannelSourceType::Multi, false};
  }
  return {Multiplicity::One, Multiplicity::One, ChannelSourceType::Single, false};
}

/// Single-source variants keep exactly one active producer per channel.
constexpr bool
isSingleSource(ServiceModel model)
{
  return attributesOf(model).channelType == ChannelSourceType::Single;
}

constexpr bool
isPartitioned(ServiceModel model)
{
  return attributesOf(model).partitioning;
}

/// Variants whose consumers may lock and unlock themselves.
constexpr bool
isAnycast(ServiceModel model)
{
  return model == ServiceModel::AC || model == ServiceModel::SLAC || model == ServiceModel::MSAC;
}

std::string_view
toString(ServiceModel model);

std::optional<ServiceModel>
parseServiceModel(std::string_view text);

/// How an anycast community picks its recipients.
struct AnycastMode
{
  enum class Kind : std::uint8_t {
    Randomized = 1,
    Dedicated = 2,
  };

  Kind kind = Kind::Dedicated;
  double pDeliver = 1.0;

  static AnycastMode
  randomized(double p)
  {
    return {Kind::Randomized, p};
  }

  static AnycastMode
  dedicated()
  {
    return {Kind::Dedicated, 1.0};
  }

  bool
  isRandomized() const
  {
    return kind == Kind::Randomized;
  }

  friend bool operator==(const AnycastMode&, const AnycastMode&) = default;
};

} // namespace yodel

#endif // YODEL_SERVICE_MODEL_HPP

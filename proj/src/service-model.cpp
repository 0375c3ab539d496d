#include "yodel/service-model.hpp"

#include <cctype>
#include <string>

namespace yodel {

std::string_view
toString(ServiceModel model)
{
  switch (model) {
  case ServiceModel::SSM:
    return "SSM";
  case ServiceModel::AC:
    return "AC";
  case ServiceModel::SLSM:
    return "SLSM";
  case ServiceModel::SLAC:
    return "SLAC";
  case ServiceModel::MSM:
    return "MSM";
  case ServiceModel::MSAC:
    return "MSAC";
  case ServiceModel::MMM:
    return "MMM";
  }
  return "?";
}

std::optional<ServiceModel>
parseServiceModel(std::string_view text)
{
  std::string upper;
  for (char c : text)
    upper.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  if (upper.rfind("YODEL-", 0) == 0)
    upper.erase(0, 6);
  for (auto m : ALL_SERVICE_MODELS) {
    if (toString(m) == upper)
      return m;
  }
  return std::nullopt;
}

} // namespace yodel

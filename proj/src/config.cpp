#include "yodel/config.hpp"

#include <charconv>

namespace yodel {

namespace {

template<typename T>
bool
parseUnsigned(const std::string& text, T& out)
{
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool
parseBool(const std::string& text, bool& out)
{
  if (text == "on" || text == "true" || text == "1") {
    out = true;
    return true;
  }
  if (text == "off" || text == "false" || text == "0") {
    out = false;
    return true;
  }
  return false;
}

} // namespace

std::optional<std::string>
SimConfig::set(const std::string& key, const std::string& value)
{
  bool ok = false;
  if (key == "p_deliver") {
    try {
      std::size_t pos = 0;
      double p = std::stod(value, &pos);
      ok = pos == value.size() && p >= 0.0 && p <= 1.0;
      if (ok)
        pDeliver = p;
    }
    catch (const std::exception&) {
      ok = false;
    }
  }
  else if (key == "partitioning") {
    ok = parseBool(value, partitioning);
  }
  else if (key == "twin_sync") {
    ok = parseUnsigned(value, twinSyncPeriod);
  }
  else if (key == "twin_threshold") {
    ok = parseUnsigned(value, twinThreshold) && twinThreshold > 0;
  }
  else if (key == "twin_timeout") {
    ok = parseUnsigned(value, twinTimeout);
  }
  else if (key == "twin_buffer_max") {
    ok = parseUnsigned(value, twinBufferMax);
  }
  else if (key == "controller_latency") {
    ok = parseUnsigned(value, controllerLatency);
  }
  else if (key == "host_link_latency") {
    ok = parseUnsigned(value, hostLinkLatency);
  }
  else if (key == "epoch") {
    ok = parseUnsigned(value, epoch);
  }
  else {
    return "unknown key '" + key + "'";
  }
  if (!ok)
    return "bad value '" + value + "' for " + key;
  return std::nullopt;
}

} // namespace yodel

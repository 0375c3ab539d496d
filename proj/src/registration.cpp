#include "yodel/registration.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace yodel {

RegistrationRow*
RegistrationTable::find(ApplicationId app, ValleyNumber valley, ChannelId channel)
{
  for (auto& r : m_rows) {
    if (r.app == app && r.valley == valley && r.channel == channel)
      return &r;
  }
  return nullptr;
}

const RegistrationRow*
RegistrationTable::find(ApplicationId app, ValleyNumber valley, ChannelId channel) const
{
  return const_cast<RegistrationTable*>(this)->find(app, valley, channel);
}

RegistrationRow&
RegistrationTable::upsert(const RegistrationRow& row)
{
  if (auto* existing = find(row.app, row.valley, row.channel)) {
    *existing = row;
    return *existing;
  }
  m_rows.push_back(row);
  return m_rows.back();
}

bool
RegistrationTable::erase(ApplicationId app, ValleyNumber valley, ChannelId channel)
{
  auto n = std::erase_if(m_rows, [&] (const RegistrationRow& r) {
    return r.app == app && r.valley == valley && r.channel == channel;
  });
  return n > 0;
}

std::vector<RegistrationRow*>
RegistrationTable::matching(ValleyNumber valley, ChannelId channel)
{
  std::vector<RegistrationRow*> out;
  for (auto& r : m_rows) {
    if (r.valley == valley && r.channel == channel)
      out.push_back(&r);
  }
  return out;
}

namespace {

void
encodeTable(std::ostringstream& os, char tag, const RegistrationTable& table)
{
  for (const auto& r : table.rows()) {
    os << tag << ' ' << r.app << ' ' << r.valley << ' ' << r.channel << ' '
       << (r.expiry ? std::to_string(*r.expiry) : std::string("-")) << ' ' << (r.lock ? 1 : 0) << ';';
  }
}

} // namespace

std::string
RegistrationTables::encode() const
{
  std::ostringstream os;
  encodeTable(os, 'P', prt);
  encodeTable(os, 'C', crt);
  return os.str();
}

RegistrationTables
RegistrationTables::decode(const std::string& text)
{
  RegistrationTables out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ';')) {
    if (item.empty())
      continue;
    std::istringstream fields(item);
    char tag = 0;
    RegistrationRow row;
    std::string expiry;
    int lock = -1;
    if (!(fields >> tag >> row.app >> row.valley >> row.channel >> expiry >> lock) ||
        (tag != 'P' && tag != 'C') || (lock != 0 && lock != 1))
      throw std::invalid_argument("malformed registration row '" + item + "'");
    std::string rest;
    if (fields >> rest)
      throw std::invalid_argument("trailing data in registration row '" + item + "'");
    if (expiry != "-") {
      try {
        std::size_t pos = 0;
        row.expiry = std::stoull(expiry, &pos);
        if (pos != expiry.size())
          throw std::invalid_argument("bad expiry");
      }
      catch (const std::exception&) {
        throw std::invalid_argument("malformed expiry in '" + item + "'");
      }
    }
    row.lock = lock == 1;
    (tag == 'P' ? out.prt : out.crt).upsert(row);
  }
  return out;
}

} // namespace yodel

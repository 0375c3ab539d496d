#include "yodel/model.hpp"

#include <doctest.h>

#include <functional>
#include <set>

using namespace yodel;
using Code = ModelRegistry::Error::Code;

namespace {

Code
codeOf(const std::function<void()>& fn)
{
  try {
    fn();
  }
  catch (const ModelRegistry::Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return Code::DuplicateName;
}

const UserId alice{"alice"};
const UserId bob{"bob"};
const UserId carol{"carol"};

} // namespace

TEST_SUITE("model") {

TEST_CASE("valley ids are allocated monotonically and names are unique")
{
  ModelRegistry reg;
  CHECK(reg.createValley(alice, "iot").id == 1);
  CHECK(codeOf([&] { reg.createValley(bob, "iot"); }) == Code::DuplicateName);
  CHECK(reg.createValley(alice, "media").id == 2);
  CHECK(reg.createValley(alice, "iot2").id == 3);
  CHECK(reg.findValley("media")->id == 2);
  CHECK_FALSE(reg.findValley("none"));
  CHECK(reg.valleyAdmin(1) == alice);
}

TEST_CASE("namespace creation")
{
  ModelRegistry reg;
  auto v1 = reg.createValley(alice, "iot").id;
  auto v2 = reg.createValley(bob, "lab").id;
  const auto& ns = reg.createNamespace(alice, v1, "sensors", Visibility::Open, ServiceModel::MSM);
  CHECK(ns.admin == alice);
  CHECK(ns.id == 1);
  CHECK(ns.valley.id == v1);
  CHECK(codeOf([&] { reg.createNamespace(alice, v1, "sensors", Visibility::Open, ServiceModel::SSM); }) ==
        Code::DuplicateName);
  // names can be reused in another valley
  CHECK(reg.createNamespace(bob, v2, "sensors", Visibility::Open, ServiceModel::SSM).serviceModel ==
        ServiceModel::SSM);
  // creator must belong to the valley
  CHECK(codeOf([&] { reg.createNamespace(carol, v1, "other", Visibility::Open, ServiceModel::MSM); }) ==
        Code::AccessDenied);
  reg.addMember(alice, v1, carol);
  CHECK(reg.createNamespace(carol, v1, "other", Visibility::Open, ServiceModel::MSM).admin == carol);
  CHECK(codeOf([&] { reg.addMember(bob, v1, bob); }) == Code::AccessDenied);
}

TEST_CASE("access to open and protected namespaces")
{
  ModelRegistry reg;
  auto v = reg.createValley(alice, "iot").id;
  reg.addMember(alice, v, bob);
  reg.createNamespace(alice, v, "open", Visibility::Open, ServiceModel::MSM);
  reg.createNamespace(alice, v, "closed", Visibility::Protected, ServiceModel::MSM);

  CHECK(reg.authorizeAccess(bob, v, "open"));
  CHECK_FALSE(reg.authorizeAccess(bob, v, "closed"));
  CHECK(reg.authorizeAccess(alice, v, "closed"));
  reg.grantAccess(alice, v, "closed", bob);
  CHECK(reg.authorizeAccess(bob, v, "closed"));

  CHECK(codeOf([&] { reg.authorizeAccess(carol, v, "open"); }) == Code::UnknownUser);
  CHECK(codeOf([&] { reg.authorizeAccess(bob, v, "missing"); }) == Code::UnknownNamespace);
  CHECK(codeOf([&] { reg.grantAccess(bob, v, "closed", bob); }) == Code::AccessDenied);
}

TEST_CASE("visibility changes")
{
  ModelRegistry reg;
  auto v = reg.createValley(alice, "iot").id;
  reg.addMember(alice, v, bob);
  reg.createNamespace(alice, v, "ns", Visibility::Open, ServiceModel::MSM);
  CHECK(reg.setVisibility(alice, v, "ns", Visibility::Protected).visibility == Visibility::Protected);
  CHECK(codeOf([&] { reg.setVisibility(bob, v, "ns", Visibility::Open); }) == Code::AccessDenied);
  CHECK_FALSE(reg.authorizeAccess(bob, v, "ns"));
  reg.setVisibility(alice, v, "ns", Visibility::Open);
  CHECK(reg.authorizeAccess(bob, v, "ns"));
  // service model never changes
  CHECK(reg.vib(v).findNamespace("ns")->serviceModel == ServiceModel::MSM);
}

TEST_CASE("community names are scoped to their namespace")
{
  ModelRegistry reg;
  auto v = reg.createValley(alice, "iot").id;
  reg.createNamespace(alice, v, "a", Visibility::Open, ServiceModel::MSM);
  reg.createNamespace(alice, v, "b", Visibility::Open, ServiceModel::SSM);
  auto& c1 = reg.ensureCommunity(v, "a", "temp");
  auto& c2 = reg.ensureCommunity(v, "b", "temp");
  CHECK(&c1 != &c2);
  CHECK(&reg.ensureCommunity(v, "a", "temp") == &c1);
  CHECK(reg.vib(v).communities().size() == 2);
  CHECK(codeOf([&] { reg.ensureCommunity(v, "zzz", "temp"); }) == Code::UnknownNamespace);
}

TEST_CASE("channel ids are unique within a valley")
{
  ModelRegistry reg;
  auto v = reg.createValley(alice, "iot").id;
  auto w = reg.createValley(alice, "other").id;
  std::set<ChannelId> seen;
  for (int i = 0; i < 100; ++i)
    CHECK(seen.insert(reg.vib(v).allocateChannelId()).second);
  // each valley has its own counter
  CHECK(reg.vib(w).allocateChannelId() == 1);
  CHECK(reg.vib(v).peekNextChannelId() == 101);
}

}

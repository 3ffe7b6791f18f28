#include <doctest.h>

#include <random>

#include "ensemble/error.h"
#include "ensemble/scene.h"
#include "oracles.h"
#include "support.h"

using namespace ensemble;
using support::MakeScene;
using support::Object;

namespace {

scene::Scene Table() {
  return MakeScene({Object("cup1", "cup", {0.0, 0, 1.0}, {"blue"}),
                    Object("cup2", "cup", {0.3, 0, 1.0}, {"red"}),
                    Object("plate", "plate", {-1.0, 0, 0.5}, {"white", "large"}),
                    Object("lamp", "lamp", {2.0, 0, -2.0}, {}, false)});
}

ErrorKind KindOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::kInternal;
}

}  // namespace

TEST_CASE("deixis hits the ground where the closed form says") {
  scene::Scene s = Table();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    Vec3 origin{u(rng), 1.0 + std::abs(u(rng)), 2.0 + u(rng)};
    Vec3 dir{u(rng), -0.05 - std::abs(u(rng)), u(rng)};
    auto target = scene::ResolveDeixis(s, origin, dir);
    Vec3 want = oracle::RayPlane(origin, dir, s.ground_plane_height);
    CHECK(target.location.y == s.ground_plane_height);
    CHECK(target.location.x == doctest::Approx(want.x).epsilon(1e-12));
    CHECK(target.location.z == doctest::Approx(want.z).epsilon(1e-12));
    // region membership and order against a direct scan
    std::vector<std::pair<double, std::string>> inside;
    for (const auto& o : s.objects) {
      double d = std::hypot(o.position.x - want.x, o.position.z - want.z);
      if (d <= s.deixis_region_radius) inside.push_back({d, o.id});
    }
    std::sort(inside.begin(), inside.end());
    std::vector<std::string> ids;
    for (const auto& p : inside) ids.push_back(p.second);
    CHECK(target.objects_in_region == ids);
  }
}

TEST_CASE("rays that never reach the ground are rejected") {
  scene::Scene s = Table();
  CHECK(KindOf([&] { scene::ResolveDeixis(s, {0, 1.6, 2}, {1, 0, 0}); }) == ErrorKind::kNoTarget);
  CHECK(KindOf([&] { scene::ResolveDeixis(s, {0, 1.6, 2}, {0, 1, -1}); }) == ErrorKind::kNoTarget);
}

TEST_CASE("region objects are ordered nearest first") {
  scene::Scene s = Table();
  auto t = scene::ResolveDeixis(s, {0.25, 1.6, 2}, {0, -1.6, -1.0});
  CHECK(t.location.z == doctest::Approx(1.0));
  REQUIRE(t.objects_in_region.size() == 2);
  CHECK(t.objects_in_region[0] == "cup2");
  CHECK(t.objects_in_region[1] == "cup1");
}

TEST_CASE("a click is a ray from the human viewpoint") {
  scene::Scene s = Table();
  auto t = scene::ResolveClick(s, 0.0, 1.0);
  CHECK(t.location.x == doctest::Approx(0.0));
  CHECK(t.location.z == doctest::Approx(1.0));
  CHECK(t.objects_in_region == std::vector<std::string>{"cup1", "cup2"});
}

TEST_CASE("description filter") {
  scene::Scene s = Table();
  std::vector<std::string> all = {"cup1", "cup2", "plate", "lamp"};
  CHECK(scene::FilterByDescription(all, s, "cup", {}) == std::vector<std::string>{"cup1", "cup2"});
  CHECK(scene::FilterByDescription(all, s, "cup", {"red"}) == std::vector<std::string>{"cup2"});
  CHECK(scene::FilterByDescription(all, s, "", {"white"}) == std::vector<std::string>{"plate"});
  CHECK(scene::FilterByDescription(all, s, "cup", {"white"}).empty());
  CHECK(scene::Describe(s.Get("plate")) == "the large white plate");
  CHECK(scene::Describe(s.Get("lamp")) == "the lamp");
}

TEST_CASE("scene validation") {
  scene::Scene s = Table();
  auto broken = [&](auto edit) {
    scene::Scene copy = s;
    edit(copy);
    return KindOf([&] { scene::Validate(copy); });
  };
  CHECK(broken([](scene::Scene& c) { c.deixis_region_radius = 0; }) == ErrorKind::kValidation);
  CHECK(broken([](scene::Scene& c) { c.objects[1].id = "cup1"; }) == ErrorKind::kValidation);
  CHECK(broken([](scene::Scene& c) { c.agent_origin.y = -1; }) == ErrorKind::kValidation);
  CHECK(broken([](scene::Scene& c) { c.human_viewpoint.y = 0; }) == ErrorKind::kValidation);
  CHECK(broken([](scene::Scene& c) { c.objects[0].position.x = NAN; }) == ErrorKind::kValidation);
  CHECK(broken([](scene::Scene& c) { c.objects[3].held_by = "agent"; }) == ErrorKind::kValidation);
  CHECK_NOTHROW(scene::Validate(s));
}

TEST_CASE("scene documents") {
  auto s = scene::LoadScene(R"({"agent_origin": [0, 1.5, 0],
    "objects": [{"id": "c", "kind": "cup", "position": [1, 0, 1], "attributes": ["blue"]}]})");
  CHECK(s.human_viewpoint == Vec3{0, 1.6, 2});
  CHECK(s.objects.at(0).attributes == std::set<std::string>{"blue"});
  CHECK(KindOf([] { scene::LoadScene(R"({"agent_origin": [0, 1.5, 0], "colour": 1})"); }) ==
        ErrorKind::kSchema);
  CHECK(KindOf([] { scene::LoadScene(R"({"objects": []})"); }) == ErrorKind::kSchema);
  CHECK(KindOf([] { scene::LoadScene("{\n\"agent_origin\": [0, 1.5,\n"); }) == ErrorKind::kSchema);
  try {
    scene::LoadScene(R"({"agent_origin": [0, 1.5, 0], "objects": [{"id": "c", "kind": "cup"}]})");
    FAIL("accepted an object without a position");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("objects[0].position") != std::string::npos);
  }
}

TEST_CASE("front of the agent faces the human") {
  scene::Scene s = Table();
  Vec3 f = s.FrontOfAgent();
  CHECK(f.y == s.ground_plane_height);
  CHECK(std::hypot(f.x - s.agent_origin.x, f.z - s.agent_origin.z) == doctest::Approx(s.front_offset));
  CHECK(f.z > s.agent_origin.z);
  CHECK(s.InBounds({4.9, 0, -4.9}));
  CHECK_FALSE(s.InBounds({5.1, 0, 0}));
}

TEST_CASE("number formatting round-trips") {
  CHECK(FormatVec3({0.2, 0, 1.5}) == "(0.2,0,1.5)");
  CHECK(FormatVec3({-0.3, 0, 1.2}) == "(-0.3,0,1.2)");
}

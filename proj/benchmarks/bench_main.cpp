#include <benchmark/benchmark.h>

#include "softhand/experiments.hpp"
#include "softhand/render.hpp"
#include "softhand/scene.hpp"
#include "softhand/solver.hpp"

using namespace softhand;

namespace {

Scene grasp_scene() {
  Scene scene;
  scene.hand = build_scene_hand(scene.hand_settings);
  scene.gravity = {0.0, -9.81};
  ObjectSpec ball;
  ball.name = "ball";
  ball.shape = CircleShape{45.0};
  ball.mass = 0.4;
  ball.position = {-4.0, 46.0};
  scene.objects.push_back(ball);
  scene.control.push_back({0.0, MotorId::agonist, false, 4.8101});
  scene.control.push_back({0.0, MotorId::antagonist, false, -6.01263});
  return scene;
}

void BM_QuasiStaticStep(benchmark::State& state) {
  const Scene scene = grasp_scene();
  SimState sim = init_state(scene);
  // Warm into contact so the benchmark covers the expensive regime.
  for (int i = 0; i < 700; ++i) quasi_static_step(sim, scene, 0.001);
  for (auto _ : state) {
    quasi_static_step(sim, scene, 0.001);
    benchmark::DoNotOptimize(sim.diag.max_joint_residual);
  }
}
BENCHMARK(BM_QuasiStaticStep);

void BM_ForwardKinematics(benchmark::State& state) {
  const HandModel hand = build_default_hand();
  const std::array<double, 3> q{0.3, 0.4, 0.5};
  for (auto _ : state) {
    const FingerPose pose = forward_kinematics(hand.fingers[1], q);
    benchmark::DoNotOptimize(pose.to_world[3].trans.x);
  }
}
BENCHMARK(BM_ForwardKinematics);

void BM_MomentArms(benchmark::State& state) {
  const HandModel hand = build_default_hand();
  const std::array<double, 3> q{0.3, 0.4, 0.5};
  for (auto _ : state) {
    const auto arms = moment_arms(hand, hand.routes[2], q);
    benchmark::DoNotOptimize(arms[0]);
  }
}
BENCHMARK(BM_MomentArms);

void BM_DetectContacts(benchmark::State& state) {
  const Scene scene = grasp_scene();
  SimState sim = init_state(scene);
  for (int i = 0; i < 700; ++i) quasi_static_step(sim, scene, 0.001);
  std::vector<ObjectPose> poses{{sim.objects[0].position, sim.objects[0].angle}};
  for (auto _ : state) {
    auto contacts = detect_contacts(scene.hand, sim.pose, scene.objects, poses);
    benchmark::DoNotOptimize(contacts.size());
  }
}
BENCHMARK(BM_DetectContacts);

void BM_ParseScene(benchmark::State& state) {
  const std::string text = serialize_scene(grasp_scene());
  for (auto _ : state) {
    auto result = parse_scene(text);
    benchmark::DoNotOptimize(result.scene.objects.size());
  }
}
BENCHMARK(BM_ParseScene);

void BM_RenderFrame(benchmark::State& state) {
  const Scene scene = grasp_scene();
  const SimState sim = init_state(scene);
  for (auto _ : state) {
    auto svg = render_frame(sim, scene);
    benchmark::DoNotOptimize(svg.size());
  }
}
BENCHMARK(BM_RenderFrame);

}  // namespace

BENCHMARK_MAIN();

// Acceptance suite: every release criterion, one pass/fail line each.
// Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "softhand/experiments.hpp"
#include "softhand/render.hpp"
#include "softhand/scene.hpp"
#include "softhand/solver.hpp"

using namespace softhand;

namespace {

int failures = 0;

void report(int index, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s%s%s\n", pass ? "PASS" : "FAIL", index, name,
              detail.empty() ? "" : " -- ", detail.c_str());
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// 1. Analytic moment arms match central finite differences of the path
//    length over 100 random configurations per route, rel. tol 1e-6, < 1 s.
void criterion_virtual_work() {
  const auto start = std::chrono::steady_clock::now();
  const HandModel hand = build_default_hand();
  oracles::Rng rng(0xacce5501);
  double worst = 0.0;
  for (const TendonRoute& route : hand.routes) {
    for (int trial = 0; trial < 100; ++trial) {
      std::array<double, 3> q{};
      for (auto& v : q) v = rng.uniform(0.0, 0.8);
      const auto analytic = moment_arms(hand, route, q);
      const auto fd = oracles::finite_difference_arms(hand, route, q, 1e-6);
      for (int j = 0; j < 3; ++j) {
        const double scale = std::max(1.0, std::abs(fd[static_cast<size_t>(j)]));
        worst = std::max(worst, std::abs(analytic[static_cast<size_t>(j)] -
                                         fd[static_cast<size_t>(j)]) /
                                    scale);
      }
    }
  }
  const double elapsed = seconds_since(start);
  char detail[128];
  std::snprintf(detail, sizeof detail, "worst rel. error %.2e, %.2f s", worst, elapsed);
  report(1, "virtual-work property (800 configurations)", worst <= 1e-6 && elapsed < 1.0,
         detail);
}

struct SuiteOutputs {
  std::vector<ExperimentReport> table1;
  std::vector<ExperimentReport> grasps;
  std::vector<ExperimentReport> blocked;
  ExperimentReport slack;
  HandSettings calibrated;
  double calibration_a1 = 0.0;
  double table1_seconds = 0.0;
  double grasp_seconds = 0.0;
};

// 3. After fitting the drive parameters on the single-finger closing test
//    alone, all seven bench rows reproduce within +-50%, under a minute.
void criterion_table1(SuiteOutputs& out) {
  const auto start = std::chrono::steady_clock::now();
  const CalibrationResult cal = calibrate();
  out.calibrated = cal.settings;
  out.calibration_a1 = cal.achieved_close_time;
  out.table1 = run_table1(cal.settings);
  out.table1_seconds = seconds_since(start);

  bool all = out.table1.size() == kTable1Reference.size();
  std::string detail;
  for (size_t i = 0; i < out.table1.size(); ++i) {
    const ScalarResult& value = out.table1[i].scalars.front();
    const bool pass = value.pass == 1;
    all = all && pass;
    char row[64];
    std::snprintf(row, sizeof row, "%s%s=%.3g", i ? " " : "", kTable1Reference[i].id,
                  value.value);
    detail += row;
  }
  char timing[48];
  std::snprintf(timing, sizeof timing, " (%.1f s)", out.table1_seconds);
  detail += timing;
  report(3, "calibrated bench rows within +-50%", all && out.table1_seconds < 60.0, detail);
}

// 4. At least 7 of the 9 object analogues reach a stable grasp and at least
//    3 final postures are pairwise distinct by more than 10 degrees.
void criterion_grasps(SuiteOutputs& out) {
  const auto start = std::chrono::steady_clock::now();
  out.grasps = run_grasp_suite(default_grasp_objects(), out.calibrated);
  out.grasp_seconds = seconds_since(start);
  const GraspSuiteSummary summary = summarize_grasp_suite(out.grasps);
  char detail[96];
  std::snprintf(detail, sizeof detail, "%d/%d stable, %d distinct postures, %.1f s",
                summary.stable_count, summary.total, summary.distinct_postures,
                out.grasp_seconds);
  report(4, "grasp suite",
         summary.stable_count >= 7 && summary.distinct_postures >= 3 &&
             out.grasp_seconds < 300.0,
         detail);
}

// 5. Any one finger blocked at half flexion: the rest reach >= 95% of their
//    free-run closure and the blocked spool's clutch saturates exactly.
void criterion_blocked(SuiteOutputs& out) {
  bool all = true;
  std::string detail;
  for (int finger = 0; finger < 4; ++finger) {
    const ExperimentReport r = run_blocked_finger(finger, {0.5, 0.5, 0.5}, out.calibrated);
    out.blocked.push_back(r);
    const ScalarResult* clutch = r.find("blocked_clutch_max");
    const ScalarResult* others = r.find("others_reached");
    const bool pass = r.passed && clutch && clutch->value == out.calibrated.clutch_slip_torque &&
                      others && others->value == 1.0;
    all = all && pass;
    detail += (finger ? " " : "");
    detail += r.name + (pass ? ":ok" : ":FAIL");
  }
  report(5, "blocked-finger differential adaptivity", all, detail);
}

// 6. Reopening delay is non-decreasing over injected slack and tendon
//    tension never goes negative.
void criterion_slack(SuiteOutputs& out) {
  out.slack = run_slack_demo({0.0, 5.0, 10.0, 20.0}, out.calibrated);
  const ScalarResult* monotone = out.slack.find("monotone_delay");
  const ScalarResult* tension = out.slack.find("min_tension");
  const bool pass = out.slack.passed && monotone && monotone->value == 1.0 && tension &&
                    tension->value >= 0.0;
  std::string detail;
  for (const ScalarResult& s : out.slack.scalars)
    if (s.name.rfind("delay_", 0) == 0) detail += s.name + "=" + std::to_string(s.value) + " ";
  report(6, "slack monotonicity", pass, detail);
}

// 2. Across every step of the full suite above, clutch torque stays within
//    0.05 N*m and motor torque within 0.40 N*m, with zero violations.
void criterion_caps(const SuiteOutputs& out) {
  int checked = 0;
  bool all = true;
  double max_clutch = 0.0, max_motor = 0.0, max_cone = -1.0;
  auto scan = [&](const ExperimentReport& r) {
    if (const ScalarResult* s = r.find("max_clutch_torque")) {
      max_clutch = std::max(max_clutch, s->value);
      all = all && s->pass == 1;
      ++checked;
    }
    if (const ScalarResult* s = r.find("max_motor_torque")) {
      max_motor = std::max(max_motor, s->value);
      all = all && s->pass == 1;
    }
    if (const ScalarResult* s = r.find("max_cone_excess")) {
      max_cone = std::max(max_cone, s->value);
      all = all && s->pass == 1;
    }
  };
  for (const auto& r : out.table1) scan(r);
  for (const auto& r : out.grasps) scan(r);
  for (const auto& r : out.blocked) scan(r);
  scan(out.slack);
  char detail[128];
  std::snprintf(detail, sizeof detail,
                "%d runs, max clutch %.6f N*m, max motor %.6f N*m, cone excess %.1e N", checked,
                max_clutch, max_motor, max_cone);
  report(2, "clutch and motor torque caps", all && checked >= 12 && max_clutch <= 0.05 + 1e-12 &&
                                                max_motor <= 0.4 + 1e-12 && max_cone <= 1e-12,
         detail);
}

// 7. Two runs of any pipeline produce byte-identical CSV and SVG, and the
//    scene format round-trips the whole fixture corpus.
void criterion_determinism() {
  bool pass = true;
  std::string detail;

  const ExperimentReport a = run_response_time(ResponseMode::single_finger, Direction::close);
  const ExperimentReport b = run_response_time(ResponseMode::single_finger, Direction::close);
  if (reports_to_csv({a}) != reports_to_csv({b})) {
    pass = false;
    detail += "report CSV differs; ";
  }

  Scene scene = default_scene();
  ObjectSpec ball;
  ball.name = "ball";
  ball.shape = CircleShape{30.0};
  ball.mass = 0.2;
  ball.position = {-4.0, 60.0};
  scene.objects.push_back(ball);
  scene.control.push_back({0.0, MotorId::agonist, false, 4.8101});
  scene.control.push_back({0.0, MotorId::antagonist, false, -6.01263});
  scene.sim.t_end = 1.5;
  const SimResult run1 = simulate(scene, StopRule::at_t_end);
  const SimResult run2 = simulate(scene, StopRule::at_t_end);
  if (trace_to_csv(scene, run1.trace) != trace_to_csv(scene, run2.trace)) {
    pass = false;
    detail += "trace CSV differs; ";
  }
  if (render_frame(run1.final_state, scene) != render_frame(run2.final_state, scene)) {
    pass = false;
    detail += "SVG differs; ";
  }

  int corpus_files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(SOFTHAND_FIXTURE_DIR)) {
    if (entry.path().extension() != ".shs") continue;
    ++corpus_files;
    std::ifstream in(entry.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    const ParseResult first = parse_scene(ss.str());
    if (!first.ok()) {
      pass = false;
      detail += entry.path().filename().string() + " failed to parse; ";
      continue;
    }
    const std::string canon = serialize_scene(first.scene);
    const ParseResult second = parse_scene(canon);
    if (!second.ok() || serialize_scene(second.scene) != canon) {
      pass = false;
      detail += entry.path().filename().string() + " round-trip failed; ";
    }
  }
  if (corpus_files < 4) {
    pass = false;
    detail += "corpus too small; ";
  }
  char count[40];
  std::snprintf(count, sizeof count, "%d corpus files round-tripped", corpus_files);
  report(7, "determinism and formats", pass, pass ? count : detail);
}

// 8. Forward kinematics, path lengths, circle-segment depths and stop
//    equilibria match independent brute-force oracles to 1e-6 on >= 50
//    randomized cases each.
void criterion_oracles() {
  oracles::Rng rng(0xacce5508);
  const HandModel hand = build_default_hand();
  bool pass = true;
  std::string detail;

  // Forward kinematics.
  double worst_fk = 0.0;
  for (int trial = 0; trial < 60; ++trial) {
    const int fi = static_cast<int>(rng.next() % 4);
    const Finger& finger = hand.fingers[static_cast<size_t>(fi)];
    std::array<double, 3> q{};
    for (auto& v : q) v = rng.uniform(0.0, 0.8);
    const FingerPose pose = forward_kinematics(finger, q);
    const Vec2 tip = pose.to_world[3].apply({finger.phalanges[3].length, 0.0});
    const oracles::Pt ref =
        oracles::chain_point(finger, q, 3, finger.phalanges[3].length, 0.0);
    worst_fk = std::max({worst_fk, std::abs(tip.x - ref.x), std::abs(tip.y - ref.y)});
  }
  if (worst_fk > 1e-6) {
    pass = false;
    detail += "fk ";
  }

  // Tendon path lengths.
  double worst_len = 0.0;
  for (int trial = 0; trial < 60; ++trial) {
    const TendonRoute& route = hand.routes[rng.next() % hand.routes.size()];
    std::array<double, 3> q{};
    for (auto& v : q) v = rng.uniform(0.0, 0.8);
    std::vector<std::array<double, 3>> all(4, {0.0, 0.0, 0.0});
    all[static_cast<size_t>(route.finger)] = q;
    const double lib = tendon_path_length(hand, route, pose_hand(hand, all));
    worst_len = std::max(worst_len, std::abs(lib - oracles::route_length(hand, route, q)));
  }
  if (worst_len > 1e-6) {
    pass = false;
    detail += "path ";
  }

  // Circle-segment contact depths.
  const HandModel rig = build_single_finger_rig();
  int depth_cases = 0;
  double worst_depth = 0.0;
  while (depth_cases < 50) {
    std::array<double, 3> q{rng.uniform(0.0, 0.8), rng.uniform(0.0, 0.8),
                            rng.uniform(0.0, 0.8)};
    const HandPose pose = pose_hand(rig, {q});
    ObjectSpec ball;
    ball.name = "b";
    const double r = rng.uniform(10.0, 50.0);
    ball.shape = CircleShape{r};
    std::vector<ObjectPose> poses{
        {{rng.uniform(-20.0, 160.0), rng.uniform(-120.0, 40.0)}, 0.0}};
    for (const ContactPoint& c : detect_contacts(rig, pose, {ball}, poses)) {
      const Phalanx& ph = rig.fingers[0].phalanges[static_cast<size_t>(c.phalanx)];
      const Transform2& t = pose.fingers[0].to_world[static_cast<size_t>(c.phalanx)];
      const Vec2 a = t.apply({0.0, 0.0});
      const Vec2 b = t.apply({ph.length, 0.0});
      const double ref = oracles::circle_capsule_depth(
          {poses[0].position.x, poses[0].position.y}, r, {a.x, a.y}, {b.x, b.y}, 15.0);
      worst_depth = std::max(worst_depth, std::abs(c.depth - ref));
      ++depth_cases;
    }
  }
  if (worst_depth > 1e-6) {
    pass = false;
    detail += "depth ";
  }

  // Single-joint stop equilibria: extensor tension T at arm r against the
  // stop spring gives penetration T*r/k_stop (per joint, zero guide friction).
  int stop_cases = 0;
  double worst_stop = 0.0;
  while (stop_cases < 50) {
    Scene scene;
    scene.hand_settings.fingers = 1;
    scene.hand_settings.guide_friction_mu = 0.0;
    scene.hand = build_scene_hand(scene.hand_settings);
    scene.sim.t_end = 4.0;
    const double wind = rng.uniform(0.02, 0.3);
    // The flexor pays out so it stays slack through the stop excursion.
    scene.control.push_back({0.0, MotorId::antagonist, false, 1.0});
    scene.control.push_back({0.0, MotorId::agonist, false, -2.0});
    scene.control.push_back({wind, MotorId::antagonist, true, 0.0});
    scene.control.push_back({wind, MotorId::agonist, true, 0.0});
    const SimResult result = simulate(scene, StopRule::at_equilibrium);
    if (result.status != SimStatus::equilibrium) continue;
    const SimState& s = result.final_state;
    const double tension = s.tendons[1].tension_at_spool;
    if (tension < 1e-6) continue;
    const auto arms = moment_arms(scene.hand, scene.hand.routes[1], s.q[0]);
    for (int j = 0; j < 3; ++j) {
      const double expected =
          tension * arms[static_cast<size_t>(j)] * 1e-3 / scene.sim.stop_stiffness;
      worst_stop = std::max(worst_stop, std::abs(s.q[0][static_cast<size_t>(j)] - expected));
      ++stop_cases;
    }
  }
  if (worst_stop > 1e-6) {
    pass = false;
    detail += "stop ";
  }

  char numbers[160];
  std::snprintf(numbers, sizeof numbers,
                "fk %.1e mm, path %.1e mm, depth %.1e mm (%d cases), stop %.1e rad (%d cases)",
                worst_fk, worst_len, worst_depth, depth_cases, worst_stop, stop_cases);
  report(8, "oracle equivalence", pass, numbers);
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  criterion_virtual_work();

  SuiteOutputs out;
  criterion_table1(out);
  criterion_grasps(out);
  criterion_blocked(out);
  criterion_slack(out);
  criterion_caps(out);
  criterion_determinism();
  criterion_oracles();

  std::printf("%s: %d criterion(s) failed, %.1f s total\n", failures == 0 ? "OK" : "FAILED",
              failures, seconds_since(start));
  return failures == 0 ? 0 : 1;
}

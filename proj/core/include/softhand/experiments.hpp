#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "softhand/scene.hpp"
#include "softhand/solver.hpp"

namespace softhand {

// Scripted bench tests: single-finger response and load tests, whole-hand
// response, the nine-object grasp suite, blocked-finger adaptivity and the
// tendon-slack demonstration. Every run is deterministic and reports the
// fingerprint of the scene that produced it.

struct ScalarResult {
  std::string name;
  double value = 0.0;
  std::string unit;
  int pass = -1;  // -1 = not a pass/fail scalar
};

struct ExperimentReport {
  std::string name;
  std::vector<ScalarResult> scalars;
  std::vector<std::string> notes;
  std::string fingerprint;       // of the scene that produced the run
  std::vector<std::string> trace_files;  // filled by callers that write traces
  bool passed = true;

  const ScalarResult* find(const std::string& scalar_name) const;
  void add(const std::string& n, double v, const std::string& unit, int pass = -1);
};

enum class ResponseMode { single_finger, whole_hand };
enum class Direction { close, open };
enum class LoadKind { bearing, pushing, closing_force };

// Hand-closing policy: the driving motor winds at full command while the
// opposite motor pays out faster than the geometry demands, accumulating a
// little slack (kOverfeed times the winding speed).
inline constexpr double kOverfeed = 1.25;

// Reference measurements of the physical hand for the seven bench rows
// {A1, A2, B1, B2, B3, C1, C2}; the harness reports simulated/reference
// ratios against these.
struct Table1Row {
  const char* id;
  const char* description;
  double reference;
  const char* unit;
};
extern const std::array<Table1Row, 7> kTable1Reference;

// Relative tolerance for the bench comparison (simulated within +-50%).
inline constexpr double kTable1Tolerance = 0.5;

ExperimentReport run_response_time(ResponseMode mode, Direction direction,
                                   const HandSettings& hand = {});
ExperimentReport run_load_test(LoadKind kind, const HandSettings& hand = {});

std::vector<ObjectSpec> default_grasp_objects();

// Final states and their scenes, for rendering the achieved grasps.
struct GraspArtifacts {
  std::vector<Scene> scenes;
  std::vector<SimState> states;
};

std::vector<ExperimentReport> run_grasp_suite(const std::vector<ObjectSpec>& objects,
                                              const HandSettings& hand = {},
                                              GraspArtifacts* artifacts = nullptr);

ExperimentReport run_blocked_finger(int finger, const std::array<double, 3>& fractions,
                                    const HandSettings& hand = {});

ExperimentReport run_slack_demo(const std::vector<double>& slack_mm,
                                const HandSettings& hand = {});

// One-dimensional fit of the motor no-load speed so the single-finger closing
// time hits the A1 reference; damping and guide friction stay at their
// defaults and are reported back unchanged. Everything downstream reuses the
// returned settings unmodified.
struct CalibrationResult {
  HandSettings settings;
  double achieved_close_time = 0.0;  // s
  int evaluations = 0;
};
CalibrationResult calibrate(const HandSettings& base = {});

// All seven bench rows with one shared calibration-equivalent settings value.
std::vector<ExperimentReport> run_table1(const HandSettings& hand = {});

// CSV: one scalar per row, "name,value,unit,pass" (pass empty when n/a).
std::string reports_to_csv(const std::vector<ExperimentReport>& reports);

// Simulation trace as CSV (header + every traced state).
std::string trace_to_csv(const Scene& scene, const std::vector<SimState>& trace);

// Grasp-suite summary: stable count and the posture-diversity measure
// (count of objects whose final postures are pairwise > 10 deg apart).
struct GraspSuiteSummary {
  int stable_count = 0;
  int total = 0;
  int distinct_postures = 0;
};
GraspSuiteSummary summarize_grasp_suite(const std::vector<ExperimentReport>& reports);

}  // namespace softhand

// Command-line front end: scene validation, simulation runs with trace/frame
// output, and the scripted bench experiments.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "softhand/experiments.hpp"
#include "softhand/io_util.hpp"
#include "softhand/render.hpp"
#include "softhand/scene.hpp"
#include "softhand/solver.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace softhand;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCriterionFailed = 1;
constexpr int kExitUsage = 2;

bool load_scene(const std::string& path, Scene& scene) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << path << ": cannot open\n";
    return false;
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  ParseResult result = parse_scene(buffer.str());
  for (const Diagnostic& d : result.diagnostics)
    std::cerr << path << ":" << d.line << ":" << d.column << ": " << d.message << "\n";
  scene = std::move(result.scene);
  return result.ok();
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
}

json report_to_json(const ExperimentReport& report) {
  json scalars = json::array();
  for (const ScalarResult& s : report.scalars) {
    json row{{"name", s.name}, {"value", s.value}, {"unit", s.unit}};
    if (s.pass >= 0) row["pass"] = s.pass == 1;
    scalars.push_back(row);
  }
  json j{{"name", report.name},
         {"fingerprint", report.fingerprint},
         {"passed", report.passed},
         {"scalars", scalars}};
  if (!report.notes.empty()) j["notes"] = report.notes;
  if (!report.trace_files.empty()) j["traces"] = report.trace_files;
  return j;
}

void write_manifest(const fs::path& out_dir, const std::string& command, const json& entries,
                    const json& files) {
  json manifest{{"command", command}, {"reports", entries}, {"files", files}};
  write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
}

int cmd_validate(const std::string& scene_path) {
  Scene scene;
  if (!load_scene(scene_path, scene)) return kExitUsage;
  const ValidationReport report = validate(scene.hand);
  if (report.ok()) {
    std::cout << "ok: " << scene_path << " (fingerprint " << scene_fingerprint(scene) << ")\n";
    return kExitOk;
  }
  for (const Violation& v : report.violations)
    std::cout << "violation: " << v.field << ": " << v.message << "\n";
  return kExitCriterionFailed;
}

int cmd_run(const std::string& scene_path, const std::string& out_dir, double dt_override,
            double t_end_override, int frames) {
  Scene scene;
  if (!load_scene(scene_path, scene)) return kExitUsage;
  if (dt_override > 0.0) scene.sim.dt = dt_override;
  if (t_end_override >= 0.0) scene.sim.t_end = t_end_override;

  const SimResult result = simulate(scene, StopRule::at_t_end);
  const fs::path out(out_dir);
  write_file(out / "trace.csv", trace_to_csv(scene, result.trace));

  json frame_files = json::array();
  if (frames > 0 && !result.trace.empty()) {
    const size_t n = result.trace.size();
    for (int f = 0; f < frames; ++f) {
      const size_t idx =
          frames == 1 ? n - 1 : (static_cast<size_t>(f) * (n - 1)) / static_cast<size_t>(frames - 1);
      char name[40];
      std::snprintf(name, sizeof name, "frames/frame_%04d.svg", f);
      write_file(out / name, render_frame(result.trace[idx], scene));
      frame_files.push_back(name);
    }
  }

  json entry{{"scene", scene_path},
             {"fingerprint", scene_fingerprint(scene)},
             {"status", to_string(result.status)},
             {"final_residual", result.final_residual}};
  write_manifest(out, "run", json::array({entry}),
                 json{{"trace", "trace.csv"}, {"frames", frame_files}});

  std::cout << "status: " << to_string(result.status) << ", t = " << fmt_num(result.final_state.t)
            << " s, residual = " << fmt_num(result.final_residual) << " N*m\n";
  return result.status == SimStatus::numerical_blowup ? kExitCriterionFailed : kExitOk;
}

int cmd_table1(const std::string& out_dir) {
  const std::vector<ExperimentReport> reports = run_table1();
  const fs::path out(out_dir);
  write_file(out / "table1.csv", reports_to_csv(reports));

  json entries = json::array();
  bool all_pass = true;
  std::cout << "id  test                               simulated  reference  ratio  pass\n";
  for (size_t i = 0; i < reports.size(); ++i) {
    const ExperimentReport& r = reports[i];
    const Table1Row& row = kTable1Reference[i];
    const ScalarResult* value = r.scalars.empty() ? nullptr : &r.scalars.front();
    const double v = value ? value->value : -1.0;
    const bool pass = value && value->pass == 1;
    all_pass = all_pass && pass;
    char line[160];
    std::snprintf(line, sizeof line, "%-3s %-36s %8.3f %9.3f  %5.2f  %s\n", row.id,
                  row.description, v, row.reference, row.reference > 0 ? v / row.reference : 0.0,
                  pass ? "yes" : "NO");
    std::cout << line;
    entries.push_back(report_to_json(r));
  }
  write_manifest(out, "table1", entries, json{{"csv", "table1.csv"}});
  return all_pass ? kExitOk : kExitCriterionFailed;
}

int cmd_grasps(const std::string& out_dir) {
  const auto objects = default_grasp_objects();
  GraspArtifacts artifacts;
  const auto reports = run_grasp_suite(objects, HandSettings{}, &artifacts);
  const fs::path out(out_dir);
  write_file(out / "grasps.csv", reports_to_csv(reports));

  json entries = json::array();
  json frame_files = json::array();
  for (size_t i = 0; i < reports.size(); ++i) {
    entries.push_back(report_to_json(reports[i]));
    if (i < artifacts.states.size()) {
      const std::string name = "frames/" + reports[i].name + ".svg";
      write_file(out / name, render_frame(artifacts.states[i], artifacts.scenes[i]));
      frame_files.push_back(name);
    }
  }

  const GraspSuiteSummary summary = summarize_grasp_suite(reports);
  for (const ExperimentReport& r : reports) {
    const ScalarResult* s = r.find("stable");
    std::cout << r.name << ": " << (s && s->value > 0.5 ? "stable" : "NOT STABLE") << "\n";
  }
  std::cout << "stable " << summary.stable_count << "/" << summary.total
            << ", distinct postures " << summary.distinct_postures << "\n";
  write_manifest(out, "grasps", entries, json{{"csv", "grasps.csv"}, {"frames", frame_files}});
  return summary.stable_count >= 7 && summary.distinct_postures >= 3 ? kExitOk
                                                                     : kExitCriterionFailed;
}

int cmd_blocked(const std::string& finger_name, double fraction, const std::string& out_dir) {
  const HandModel hand = build_default_hand();
  int finger = -1;
  for (size_t i = 0; i < hand.fingers.size(); ++i)
    if (hand.fingers[i].name == finger_name) finger = static_cast<int>(i);
  if (finger < 0) {
    std::cerr << "unknown finger '" << finger_name << "' (thumb, index, middle, pinkie)\n";
    return kExitUsage;
  }
  if (fraction < 0.0 || fraction > 1.0) {
    std::cerr << "fraction must be in [0, 1]\n";
    return kExitUsage;
  }
  const ExperimentReport report =
      run_blocked_finger(finger, {fraction, fraction, fraction}, HandSettings{});
  write_file(fs::path(out_dir) / "blocked.csv", reports_to_csv({report}));
  write_manifest(fs::path(out_dir), "blocked", json::array({report_to_json(report)}),
                 json{{"csv", "blocked.csv"}});
  for (const ScalarResult& s : report.scalars)
    std::cout << s.name << " = " << fmt_num(s.value) << " " << s.unit
              << (s.pass < 0 ? "" : (s.pass ? "  [pass]" : "  [FAIL]")) << "\n";
  return report.passed ? kExitOk : kExitCriterionFailed;
}

int cmd_slack(const std::string& sweep, const std::string& out_dir) {
  std::vector<double> values;
  std::stringstream ss(sweep);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      values.push_back(std::stod(item));
    } catch (...) {
      std::cerr << "bad sweep value '" << item << "'\n";
      return kExitUsage;
    }
    if (values.back() < 0.0) {
      std::cerr << "slack must be >= 0\n";
      return kExitUsage;
    }
  }
  if (values.empty()) {
    std::cerr << "empty sweep\n";
    return kExitUsage;
  }
  const ExperimentReport report = run_slack_demo(values, HandSettings{});
  write_file(fs::path(out_dir) / "slack.csv", reports_to_csv({report}));
  write_manifest(fs::path(out_dir), "slack", json::array({report_to_json(report)}),
                 json{{"csv", "slack.csv"}});
  for (const ScalarResult& s : report.scalars)
    std::cout << s.name << " = " << fmt_num(s.value) << " " << s.unit
              << (s.pass < 0 ? "" : (s.pass ? "  [pass]" : "  [FAIL]")) << "\n";
  return report.passed ? kExitOk : kExitCriterionFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Planar quasi-static simulator of a tendon-driven underactuated hand"};
  app.require_subcommand(1);

  std::string scene_path, out_dir = "out";
  double dt = -1.0, t_end = -1.0, fraction = 0.5;
  int frames = 0;
  std::string finger = "middle", sweep = "0,5,10,20";

  auto* validate_cmd = app.add_subcommand("validate", "Parse a scene and check hand invariants");
  validate_cmd->add_option("scene", scene_path, "Scene file (.shs)")->required();

  auto* run_cmd = app.add_subcommand("run", "Simulate a scene; write trace and frames");
  run_cmd->add_option("scene", scene_path, "Scene file (.shs)")->required();
  run_cmd->add_option("--out", out_dir, "Output directory");
  run_cmd->add_option("--dt", dt, "Override time step (s)");
  run_cmd->add_option("--t-end", t_end, "Override end time (s)");
  run_cmd->add_option("--frames", frames, "Number of SVG frames to render");

  auto* table1_cmd = app.add_subcommand("table1", "Run the seven bench tests");
  table1_cmd->add_option("--out", out_dir, "Output directory");

  auto* grasps_cmd = app.add_subcommand("grasps", "Run the nine-object grasp suite");
  grasps_cmd->add_option("--out", out_dir, "Output directory");

  auto* blocked_cmd = app.add_subcommand("blocked", "Blocked-finger adaptivity test");
  blocked_cmd->add_option("--finger", finger, "thumb, index, middle or pinkie");
  blocked_cmd->add_option("--fraction", fraction, "Blocked flexion fraction [0,1]");
  blocked_cmd->add_option("--out", out_dir, "Output directory");

  auto* slack_cmd = app.add_subcommand("slack", "Slack vs reopening-delay sweep");
  slack_cmd->add_option("--sweep", sweep, "Comma-separated slack list (mm)");
  slack_cmd->add_option("--out", out_dir, "Output directory");

  CLI11_PARSE(app, argc, argv);

  if (validate_cmd->parsed()) return cmd_validate(scene_path);
  if (run_cmd->parsed()) return cmd_run(scene_path, out_dir, dt, t_end, frames);
  if (table1_cmd->parsed()) return cmd_table1(out_dir);
  if (grasps_cmd->parsed()) return cmd_grasps(out_dir);
  if (blocked_cmd->parsed()) return cmd_blocked(finger, fraction, out_dir);
  if (slack_cmd->parsed()) return cmd_slack(sweep, out_dir);
  return kExitUsage;
}

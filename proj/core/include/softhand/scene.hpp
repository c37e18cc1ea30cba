#pragma once

#include <array>
#include <string>
#include <variant>
#include <vector>

#include "softhand/model.hpp"
#include "softhand/vec2.hpp"

namespace softhand {

// Scene description: the unit of simulation. Scenes are written in a small
// line-oriented text format (.shs); see parse_scene / serialize_scene.

struct CircleShape {
  double radius = 10.0;  // mm
};

struct PolygonShape {
  std::vector<Vec2> vertices;  // object-local mm, convex, counter-clockwise
};

struct CapsuleShape {
  Vec2 a, b;
  double radius = 5.0;  // mm
};

using Shape = std::variant<CircleShape, PolygonShape, CapsuleShape>;

struct ObjectSpec {
  std::string name;
  Shape shape = CircleShape{};
  double mass = 0.1;      // kg
  Vec2 position;          // palm frame, mm
  double angle = 0.0;     // rad
  bool mobile = true;
  double friction = 0.6;  // Coulomb coefficient of the object surface
};

enum class MotorId { agonist = 0, antagonist = 1 };

struct MotorCommand {
  double t = 0.0;        // s
  MotorId motor = MotorId::agonist;
  bool hold = false;     // hold position (brake); speed ignored
  double speed = 0.0;    // rad/s, positive = wind
};

// External point load on a phalanx (bench tests hang weights this way).
struct PointLoad {
  std::string name;
  int finger = 0;
  int phalanx = 0;
  Vec2 local;   // phalanx-local application point, mm
  Vec2 force;   // world N
};

// Rigid joint constraint: finger held at the given fraction of each joint's range.
struct JointBlock {
  int finger = 0;
  std::array<double, 3> fraction{0.5, 0.5, 0.5};
};

struct SimParams {
  double dt = 0.001;              // s
  double t_end = 2.0;             // s
  double equilibrium_tol = 0.0001;  // N*m residual for equilibrium detection
  int trace_every = 10;           // record every k-th step
  double contact_stiffness = 3.0;  // N/mm penalty stiffness (soft pads)
  double stop_stiffness = 20.0;   // N*m/rad one-sided joint stop spring
  double qdot_limit = 500.0;      // rad/s blowup guard
};

// Scalar knobs of the default hand that scenes may override. Kept verbatim so
// serialization round-trips; the hand model is derived from them at parse.
struct HandSettings {
  int fingers = 4;  // 4 = whole hand, 1 = single-finger bench rig
  bool rig_palm_up = true;  // bench rig orientation (ignored for the whole hand)
  // Bench table surface for rig scenes (a capsule of radius 15 mm); the
  // default parks it far from the workspace.
  Vec2 rig_table_a{-500.0, -500.0};
  Vec2 rig_table_b{-400.0, -500.0};
  // Every joint starts at this angle (rad) with tendons taut, as if the
  // mechanism were assembled in that posture.
  double initial_q = 0.0;
  double guide_friction_mu = 0.05;
  double tendon_stiffness = 5.0;
  double joint_damping = 0.015;
  double spool_radius = 8.0;
  double clutch_slip_torque = 0.05;
  double motor_max_torque = 0.4;
  double motor_no_load_speed = 4.8101;
  double joint_limit = 0.8;
  double pad_friction = 0.9;
  double beam_friction = 0.5;
  double aperture = 100.0;
};

struct Scene {
  HandSettings hand_settings;
  HandModel hand;                    // derived from hand_settings
  std::vector<ObjectSpec> objects;
  Vec2 gravity{0.0, -9.81};          // m/s^2
  std::vector<MotorCommand> control; // sorted by t, stable
  std::vector<PointLoad> loads;
  std::vector<JointBlock> blocks;
  SimParams sim;
};

HandConfig hand_config_from_settings(const HandSettings& s);
HandModel build_scene_hand(const HandSettings& s);

// Planar inertia about the object's local origin, kg*m^2, uniform density.
double shape_inertia(const Shape& shape, double mass);
// Radius of the smallest origin-centered disc containing the shape, mm.
double shape_bounding_radius(const Shape& shape);

// Scene with all defaults (equivalent to parsing an empty document).
Scene default_scene();

struct Diagnostic {
  int line = 1;
  int column = 1;
  std::string message;
};

struct ParseResult {
  Scene scene;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return diagnostics.empty(); }
};

// Total over all inputs: never throws, reports syntax and semantic errors
// with 1-based line/column. On error the scene is the defaults merged with
// whatever parsed cleanly; callers should gate on ok().
ParseResult parse_scene(const std::string& text);

// Canonical form: sorted sections, fixed key order, 6-significant-digit
// numbers, LF line endings. Deterministic byte-for-byte.
std::string serialize_scene(const Scene& scene);

// FNV-1a 64 of the canonical serialization, as 16 hex digits.
std::string scene_fingerprint(const Scene& scene);

}  // namespace softhand

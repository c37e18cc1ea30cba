#pragma once

#include <array>
#include <string>
#include <vector>

#include "softhand/vec2.hpp"

namespace softhand {

// Mechanical description of a tendon-driven underactuated planar hand.
// Units: lengths mm, angles rad, torques N*m, stiffness N/mm unless noted.

enum class TendonSide { flexor, extensor };

// Which local side of a finger faces the palm. Finger geometry is authored
// for neg_y (flexor guides below the phalanx midline); pos_y mirrors it.
enum class PalmSide { neg_y, pos_y };

struct Phalanx {
  double length = 0.0;                  // mm, along local +x from the proximal joint
  std::vector<Vec2> guides_flexor;      // phalanx-local guide points, mm
  std::vector<Vec2> guides_extensor;
  bool is_terminal = false;
  Vec2 anchor_flexor;                   // valid iff is_terminal
  Vec2 anchor_extensor;
  double pad_friction = 0.5;            // Coulomb coefficient of the contact surface
};

struct Finger {
  std::string name;
  std::array<Phalanx, 4> phalanges;     // base (welded to palm), medial, medial, distal
  std::array<double, 3> joint_min{};    // rad; 0 = hyperextension stop
  std::array<double, 3> joint_max{};
  Vec2 base_pos;                        // palm frame, mm
  double base_angle = 0.0;              // rad; local +x maps to this heading
  PalmSide palm_side = PalmSide::neg_y;
};

// +1 when flexion (q > 0) is a counter-clockwise world rotation.
inline double flex_sign(const Finger& f) {
  return f.palm_side == PalmSide::pos_y ? 1.0 : -1.0;
}

// One point of a tendon polyline. body -1 = palm frame (static), 0..3 = phalanx.
struct RoutePoint {
  int body = -1;
  Vec2 local;
};

struct TendonRoute {
  int finger = 0;
  TendonSide side = TendonSide::flexor;
  int spool = 0;                        // index into DriveSpec::spools
  std::vector<RoutePoint> points;       // palm guides, phalanx guides, terminal anchor
  double rest_length = 0.0;             // mm of tendon between first point and anchor at build pose
};

struct MotorSpec {
  double max_torque = 0.4;              // N*m stall torque
  double no_load_speed = 4.8101;        // rad/s, calibration parameter
};

struct ClutchSpec {
  double slip_torque = 0.05;            // N*m transmitted before slipping
};

struct SpoolSpec {
  double radius = 8.0;                  // mm
  int clutch = 0;
  int shaft = 0;                        // 0 = agonist, 1 = antagonist
};

struct DriveSpec {
  std::array<MotorSpec, 2> motors;      // [agonist, antagonist]
  std::vector<ClutchSpec> clutches;
  std::vector<SpoolSpec> spools;        // spool i drives route i
};

struct Capsule {
  Vec2 a, b;
  double radius = 15.0;                 // mm
};

struct HandModel {
  std::vector<Finger> fingers;
  std::vector<TendonRoute> routes;      // route i is wound by spool i
  DriveSpec drive;
  Capsule palm;                         // palm support surface (contact geometry)
  double palm_friction = 0.5;
  double tendon_stiffness = 5.0;        // N/mm, lumped series elasticity
  double guide_friction_mu = 0.05;      // capstan coefficient per guide
  double joint_damping = 0.015;         // N*m*s/rad
  double phalanx_half_width = 15.0;     // mm, contact capsule radius
};

// Everything overridable on the default build. All values are chosen to be
// exact at 6 significant digits so canonical scene serialization round-trips.
struct HandConfig {
  std::array<double, 4> phalanx_lengths{40.0, 35.0, 35.0, 35.0};
  std::array<Vec2, 3> flexor_guides{Vec2{6.0, -12.0}, Vec2{17.5, -16.0}, Vec2{29.0, -12.0}};
  std::array<Vec2, 3> extensor_guides{Vec2{6.0, 12.0}, Vec2{17.5, 8.0}, Vec2{29.0, 12.0}};
  Vec2 distal_flexor_guide{6.0, -12.0};
  Vec2 distal_extensor_guide{6.0, 12.0};
  Vec2 anchor_flexor{30.0, -8.0};
  Vec2 anchor_extensor{30.0, 8.0};
  double joint_limit = 0.8;             // rad per joint; see moment-arm range note in build_default_hand
  double pad_friction = 0.9;            // rubber fingertip pad
  double beam_friction = 0.5;           // plain structural beam
  double spool_radius = 8.0;            // mm -> max tendon tension slip/radius = 6.25 N
  double clutch_slip_torque = 0.05;     // N*m
  double motor_max_torque = 0.4;        // N*m
  double motor_no_load_speed = 4.8101;  // rad/s (calibrated on the single-finger closing test)
  double tendon_stiffness = 5.0;        // N/mm
  double guide_friction_mu = 0.05;
  double joint_damping = 0.015;         // N*m*s/rad
  double aperture = 100.0;              // mm between thumb base and index base
  Vec2 rig_table_a{-500.0, -500.0};     // bench table capsule for the rig
  Vec2 rig_table_b{-400.0, -500.0};
};

// Default four-finger hand: thumb opposing index/middle/pinkie across the
// palm, eight tendon routes, two motors, one clutch+spool per route.
HandModel build_default_hand(const HandConfig& config = {});

// Single-finger test apparatus: one finger on a bench base, two motors with
// one clutch+spool each. Intentionally does not satisfy the whole-hand
// counting invariants checked by validate().
//
// palm_up selects which world side the finger flexes toward: true curls the
// fingertip upward (+y), false downward.
HandModel build_single_finger_rig(const HandConfig& config = {}, bool palm_up = true);

struct Violation {
  std::string field;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

// Structural and sign checks. Violations are data, not errors: the report
// lists every broken invariant with the field that carries it.
ValidationReport validate(const HandModel& model);

}  // namespace softhand

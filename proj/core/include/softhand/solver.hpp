#pragma once

#include <array>
#include <string>
#include <vector>

#include "softhand/contact.hpp"
#include "softhand/drivetrain.hpp"
#include "softhand/kinematics.hpp"
#include "softhand/scene.hpp"

namespace softhand {

// Time-stepped quasi-static simulation. Joints are overdamped first-order
// (q_dot = torque / damping) with the dominant stiffnesses treated implicitly
// so stiff contact does not constrain dt. Objects carry strongly damped
// second-order planar dynamics so they settle within a few tens of ms.

struct ObjectState {
  Vec2 position;        // mm
  double angle = 0.0;   // rad
  Vec2 velocity;        // mm/s
  double omega = 0.0;   // rad/s
};

struct StepDiagnostics {
  double max_joint_residual = 0.0;   // N*m, torques excluding damping
  double max_object_residual = 0.0;  // N*m equivalent (see kCharLength)
  double max_clutch_torque = 0.0;    // N*m over all clutches this step
  double max_motor_torque = 0.0;     // N*m
  int contact_count = 0;
};

struct SimState {
  double t = 0.0;
  std::vector<std::array<double, 3>> q;     // per finger
  std::vector<std::array<double, 3>> qdot;  // rad/s
  HandPose pose;
  std::vector<ObjectState> objects;
  std::array<MotorState, 2> motors;
  std::vector<ClutchState> clutches;   // one per route
  std::vector<SpoolState> spools;
  std::vector<TendonState> tendons;
  std::vector<ContactPoint> contacts;
  StepDiagnostics diag;
  // Previous-step contact stiffness per joint and object, kept so the
  // implicit integrator stays stiff across one-step contact dropouts
  // (suppresses penalty on/off chatter).
  std::vector<std::array<double, 3>> contact_k_joint;
  std::vector<std::array<double, 3>> contact_c_joint;
  std::vector<double> contact_k_obj_lin;
  std::vector<double> contact_k_obj_ang;
  std::vector<double> contact_c_obj_lin;
  std::vector<double> contact_c_obj_ang;
  // Friction bristle anchors per contact pair.
  ContactMemoryMap contact_memory;
};

enum class SimStatus { ok, reached_t_end, equilibrium, equilibrium_not_reached, numerical_blowup };

const char* to_string(SimStatus s);

// Object force residuals are folded into the N*m equilibrium test at this
// characteristic lever (m).
inline constexpr double kCharLength = 0.05;

// Equilibrium requires the residual below tolerance this many consecutive steps.
inline constexpr int kEquilibriumStreak = 50;

SimState init_state(const Scene& scene);

// One tick. Order: contacts and torques from the current state, joint and
// object integration, forward kinematics, shaft/clutch step, tendon refresh.
SimStatus quasi_static_step(SimState& state, const Scene& scene, double dt);

enum class StopRule { at_t_end, at_equilibrium };

struct SimResult {
  SimStatus status = SimStatus::ok;
  std::vector<SimState> trace;   // every sim.trace_every steps, plus the last
  SimState final_state;
  double final_residual = 0.0;   // N*m
  std::string message;
};

SimResult simulate(const Scene& scene, StopRule stop = StopRule::at_t_end);

struct GraspReport {
  bool stable = false;
  double force_residual = 0.0;    // N on the object
  double torque_residual = 0.0;   // N*m on the object
  int contact_count = 0;
  double min_cone_margin = 0.0;   // min over contacts of (mu*fn - |ft|)/(mu*fn)
  bool opposing_contacts = false; // some pair of contact normals opposes
};

// Wrench-residual tolerance is in N*m equivalent: |torque| + |force|*kCharLength.
GraspReport grasp_quality(const SimState& state, const Scene& scene, int object,
                          double tol = 0.001);

}  // namespace softhand

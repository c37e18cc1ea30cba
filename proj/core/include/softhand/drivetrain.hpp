#pragma once

#include <span>
#include <utility>

#include "softhand/model.hpp"

namespace softhand {

// Drive side of the hand: two speed-commanded motors, each turning a shaft
// that carries one clutch-coupled spool per tendon of its group.

struct MotorState {
  double shaft_angle = 0.0;      // rad, positive = winding its tendon group
  double speed = 0.0;            // rad/s achieved last step
  double commanded_speed = 0.0;  // rad/s target (0 with hold = brake)
  bool hold = true;
  double delivered_torque = 0.0; // N*m, quasi-static reaction against the load
  long long encoder_ticks = 0;   // 1 tick = 1 degree
};

struct ClutchState {
  double transmitted_torque = 0.0;  // N*m, clamped to +-slip_torque
  bool slipping = false;
  double slip_angle_accum = 0.0;    // rad of relative shaft/spool travel while slipping
};

struct SpoolState {
  double angle = 0.0;         // rad, positive = winding
  double wound_length = 0.0;  // mm = radius * angle
  int tendon = 0;             // route index
};

// Ideal torque clamp: transmitted = clamp(demand, -limit, +limit),
// slipping whenever the demand exceeds the limit.
std::pair<double, bool> clutch_transmit(double demand, double limit);

// Linear speed-torque droop: achievable speed = command * max(0, 1 - |load|/max_torque).
// Advances the shaft and the encoder; load is the torque opposing the motor.
MotorState motor_step(const MotorState& state, double command, double load, double dt,
                      const MotorSpec& spec);

// One shaft tick: the motor advances against the previous step's clutch load,
// then each spool either tracks the shaft or, if the tendon's pull exceeds the
// clutch limit, slips to the angle where tension * radius equals the limit.
struct ShaftStepInput {
  double command = 0.0;       // rad/s
  bool hold = false;
  double dt = 0.0;
  double tendon_stiffness = 5.0;                // N/mm
  std::span<const double> path_length;          // mm, per spool on this shaft
  std::span<const double> rest_length;          // mm
  std::span<const double> spool_radius;         // mm
  std::span<const double> slip_torque;          // N*m
};

void shaft_step(MotorState& motor, std::span<ClutchState> clutches,
                std::span<SpoolState> spools, const ShaftStepInput& in,
                const MotorSpec& spec);

}  // namespace softhand

#include "softhand/drivetrain.hpp"

#include <cmath>

namespace softhand {

std::pair<double, bool> clutch_transmit(double demand, double limit) {
  if (demand > limit) return {limit, true};
  if (demand < -limit) return {-limit, true};
  return {demand, false};
}

MotorState motor_step(const MotorState& state, double command, double load, double dt,
                      const MotorSpec& spec) {
  MotorState next = state;
  next.commanded_speed = command;
  next.hold = false;
  const double droop = 1.0 - std::abs(load) / spec.max_torque;
  next.speed = command * (droop > 0.0 ? droop : 0.0);
  next.shaft_angle += next.speed * dt;
  next.encoder_ticks = std::llround(next.shaft_angle * 180.0 / 3.14159265358979323846);
  next.delivered_torque = std::min(std::abs(load), spec.max_torque);
  return next;
}

void shaft_step(MotorState& motor, std::span<ClutchState> clutches,
                std::span<SpoolState> spools, const ShaftStepInput& in,
                const MotorSpec& spec) {
  double load = 0.0;
  for (const ClutchState& c : clutches) load += std::abs(c.transmitted_torque);

  if (in.hold) {
    motor.commanded_speed = 0.0;
    motor.hold = true;
    motor.speed = 0.0;
    motor.delivered_torque = std::min(load, spec.max_torque);
  } else {
    motor = motor_step(motor, in.command, load, in.dt, spec);
  }
  const double dshaft = motor.speed * in.dt;

  for (size_t i = 0; i < spools.size(); ++i) {
    SpoolState& spool = spools[i];
    ClutchState& clutch = clutches[i];
    const double radius = in.spool_radius[i];
    const double slip = in.slip_torque[i];

    const double tracked = spool.angle + dshaft;
    const double commanded = in.rest_length[i] - radius * tracked;
    const double stretch = in.path_length[i] - commanded;
    const double tension = in.tendon_stiffness * (stretch > 0.0 ? stretch : 0.0);
    const double demand = tension * radius * 1e-3;  // N*m pulled against the clutch

    auto [transmitted, slipping] = clutch_transmit(demand, slip);
    if (!slipping) {
      spool.angle = tracked;
    } else {
      // Massless spool settles where tension * radius balances the slip limit.
      const double t_slip = slip / (radius * 1e-3);
      const double commanded_slip = in.path_length[i] - t_slip / in.tendon_stiffness;
      const double solved = (in.rest_length[i] - commanded_slip) / radius;
      clutch.slip_angle_accum += std::abs(tracked - solved);
      spool.angle = solved;
    }
    spool.wound_length = radius * spool.angle;
    clutch.transmitted_torque = transmitted;
    clutch.slipping = slipping;
  }

  double total = 0.0;
  for (const ClutchState& c : clutches) total += std::abs(c.transmitted_torque);
  motor.delivered_torque = std::min(total, spec.max_torque);
}

}  // namespace softhand

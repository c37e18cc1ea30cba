#include <cmath>
#include <vector>

#include "doctest.h"
#include "softhand/drivetrain.hpp"

using namespace softhand;

TEST_CASE("clutch transmits below the limit and clamps above it") {
  CHECK(clutch_transmit(0.03, 0.05) == std::pair{0.03, false});
  CHECK(clutch_transmit(0.07, 0.05) == std::pair{0.05, true});
  CHECK(clutch_transmit(-0.07, 0.05) == std::pair{-0.05, true});
  CHECK(clutch_transmit(0.05, 0.05) == std::pair{0.05, false});
}

TEST_CASE("motor speed droops linearly with load") {
  MotorSpec spec;
  spec.max_torque = 0.4;
  MotorState m;
  SUBCASE("no load runs at command") {
    const MotorState next = motor_step(m, 3.0, 0.0, 0.01, spec);
    CHECK(next.speed == doctest::Approx(3.0));
    CHECK(next.shaft_angle == doctest::Approx(0.03));
  }
  SUBCASE("stall torque stops the shaft") {
    const MotorState next = motor_step(m, 3.0, 0.4, 0.01, spec);
    CHECK(next.speed == 0.0);
  }
  SUBCASE("half load gives half speed") {
    const MotorState next = motor_step(m, 3.0, 0.2, 0.01, spec);
    CHECK(next.speed == doctest::Approx(1.5));
  }
  SUBCASE("encoder counts whole degrees") {
    MotorState s;
    s.shaft_angle = 0.5;  // 28.6 degrees
    const MotorState next = motor_step(s, 0.0, 0.0, 0.01, spec);
    CHECK(next.encoder_ticks == 29);
  }
}

namespace {

struct ShaftFixture {
  MotorState motor;
  std::vector<ClutchState> clutches{4};
  std::vector<SpoolState> spools{4};
  std::vector<double> paths{200.0, 200.0, 200.0, 200.0};
  std::vector<double> rests{200.0, 200.0, 200.0, 200.0};
  std::vector<double> radii{8.0, 8.0, 8.0, 8.0};
  std::vector<double> slips{0.05, 0.05, 0.05, 0.05};
  MotorSpec spec;

  void step(double command, double dt, double stiffness = 5.0) {
    ShaftStepInput in;
    in.command = command;
    in.hold = false;
    in.dt = dt;
    in.tendon_stiffness = stiffness;
    in.path_length = paths;
    in.rest_length = rests;
    in.spool_radius = radii;
    in.slip_torque = slips;
    shaft_step(motor, clutches, spools, in, spec);
  }
};

}  // namespace

TEST_CASE("slack spools track the shaft exactly") {
  ShaftFixture fx;
  // Short paths keep every tendon slack while winding a little.
  for (auto& p : fx.paths) p = 100.0;
  for (int i = 0; i < 10; ++i) fx.step(2.0, 0.001);
  for (const SpoolState& s : fx.spools)
    CHECK(s.angle == doctest::Approx(fx.motor.shaft_angle).epsilon(1e-12));
  for (const ClutchState& c : fx.clutches) {
    CHECK(c.transmitted_torque == 0.0);
    CHECK(!c.slipping);
  }
}

TEST_CASE("an overloaded spool slips at the clutch and holds 6.25 N") {
  ShaftFixture fx;
  // Pre-stretch tendon 0 far beyond the slip point: 10 N demand at 8 mm.
  fx.paths[0] = 202.0;  // 2 mm stretch -> 10 N at 5 N/mm
  fx.step(2.0, 0.001);

  CHECK(fx.clutches[0].slipping);
  CHECK(fx.clutches[0].transmitted_torque == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(fx.clutches[0].slip_angle_accum > 0.0);
  // The spool settles where tension * radius equals the limit.
  const double commanded = fx.rests[0] - fx.spools[0].wound_length;
  const double tension = 5.0 * (fx.paths[0] - commanded);
  CHECK(tension == doctest::Approx(0.05 / 0.008).epsilon(1e-9));

  // The other three keep winding with the shaft.
  for (int i = 1; i < 4; ++i)
    CHECK(fx.spools[static_cast<size_t>(i)].angle ==
          doctest::Approx(fx.motor.shaft_angle).epsilon(1e-12));
}

TEST_CASE("four saturated clutches cannot stall the motor") {
  ShaftFixture fx;
  for (auto& p : fx.paths) p = 202.0;  // all slipping
  fx.step(2.0, 0.001);
  double total = 0.0;
  for (const ClutchState& c : fx.clutches) total += std::abs(c.transmitted_torque);
  CHECK(total == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(total < fx.spec.max_torque);
  // Droop at 0.2 N*m of 0.4 N*m halves the speed but keeps it positive.
  fx.step(2.0, 0.001);
  CHECK(fx.motor.speed == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("slip dissipation never reverses") {
  ShaftFixture fx;
  fx.paths[0] = 202.0;
  double prev_accum = 0.0;
  for (int i = 0; i < 50; ++i) {
    fx.step(2.0, 0.001);
    CHECK(fx.clutches[0].slip_angle_accum >= prev_accum);
    prev_accum = fx.clutches[0].slip_angle_accum;
  }
  CHECK(prev_accum * 0.05 > 0.0);  // dissipated energy is positive
}

TEST_CASE("holding brakes the shaft while clutches still slip") {
  ShaftFixture fx;
  fx.paths[0] = 202.0;
  ShaftStepInput in;
  in.command = 0.0;
  in.hold = true;
  in.dt = 0.001;
  in.tendon_stiffness = 5.0;
  in.path_length = fx.paths;
  in.rest_length = fx.rests;
  in.spool_radius = fx.radii;
  in.slip_torque = fx.slips;
  shaft_step(fx.motor, fx.clutches, fx.spools, in, fx.spec);
  CHECK(fx.motor.speed == 0.0);
  CHECK(fx.motor.shaft_angle == 0.0);
  CHECK(fx.clutches[0].slipping);  // tension still above the limit pays out
}

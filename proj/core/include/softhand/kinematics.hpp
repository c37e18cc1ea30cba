#pragma once

#include <array>
#include <vector>

#include "softhand/model.hpp"
#include "softhand/vec2.hpp"

namespace softhand {

// Pose of one finger's serial chain. Phalanx k's frame is phalanx k-1's frame
// translated by its length and rotated by the joint angle about the shared
// axle (flexion maps to a signed world rotation through flex_sign).
struct FingerPose {
  std::array<Transform2, 4> to_world;
  std::array<Vec2, 3> joint_world;  // axle positions of the three joints
  bool clamped = false;             // q was outside limits and got clamped
};

struct HandPose {
  std::vector<FingerPose> fingers;
};

// q outside [min - kClampMargin, max + kClampMargin] is clamped and flagged.
// The margin leaves room for the penalty-stop overshoot of the solver.
inline constexpr double kClampMargin = 0.2;

FingerPose forward_kinematics(const Finger& finger, const std::array<double, 3>& q);

HandPose pose_hand(const HandModel& model, const std::vector<std::array<double, 3>>& q);

// Resolved tendon polyline with everything downstream consumers need.
struct RouteGeometry {
  std::vector<Vec2> points;            // world, mm
  std::vector<int> body;               // body index per point (-1 palm)
  std::vector<double> segment_length;  // mm, size points-1
  std::vector<double> wrap_angle;      // rad per interior point (guide), size points-2
  double length = 0.0;                 // mm
};

RouteGeometry route_geometry(const HandModel& model, const TendonRoute& route,
                             const HandPose& pose);

double tendon_path_length(const HandModel& model, const TendonRoute& route,
                          const HandPose& pose);

// d(segment length)/dq_j for every segment of the route, in mm/rad of the
// flexion coordinate. Only segments straddling joint j contribute.
std::vector<std::array<double, 3>> segment_length_derivatives(const RouteGeometry& geom,
                                                              const FingerPose& finger_pose,
                                                              double flex_sign);

// Moment arms r_j = -d(path length)/dq_j, mm, positive = flexing.
std::array<double, 3> moment_arms(const HandModel& model, const TendonRoute& route,
                                  const std::array<double, 3>& q);

enum class Sliding { winding, paying_out, stuck };

// Per-route elastic/friction state at one instant.
struct TendonState {
  double path_length = 0.0;       // mm
  double commanded_length = 0.0;  // mm, rest_length - wound length
  double stretch = 0.0;           // mm, max(0, path - commanded)
  double tension_at_spool = 0.0;  // N
  std::vector<double> segment_tension;
  // Friction state: per-segment tension as a fraction of the spool tension.
  // Held while stuck (clamped into the capstan band), so spool-tension
  // jitter scales all segments proportionally instead of ratcheting them.
  std::vector<double> segment_factor;
  bool slack = false;             // taut nowhere: path < commanded
  Sliding sliding = Sliding::stuck;
  // Relay with hysteresis for the sliding classification: accumulated path
  // change clamped to +-kSlideBand; the mode switches only at the rails, so
  // sub-band standstill jitter cannot flip the capstan direction.
  double slide_accum = 0.0;
};

inline constexpr double kSlideBand = 0.01;  // mm

// Capstan attenuation over the route's guides. Winding slides tendon toward
// the spool so tension decays distally by e^(-mu*beta) per guide; paying out
// reverses the exponent. When stuck each segment keeps its previous tension
// ratio clamped into the friction band [e^(-mu*B), e^(+mu*B)] around the
// current spool tension. factors_io carries the per-segment ratios between
// calls; null or mismatched sizes fall back to the winding profile.
std::vector<double> tension_profile(const RouteGeometry& geom, double tension_at_spool,
                                    Sliding sliding, double mu,
                                    std::vector<double>* factors_io = nullptr);

}  // namespace softhand

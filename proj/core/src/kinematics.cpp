#include "softhand/kinematics.hpp"

#include <cmath>

namespace softhand {

FingerPose forward_kinematics(const Finger& finger, const std::array<double, 3>& q) {
  FingerPose pose;
  std::array<double, 3> qc = q;
  for (int j = 0; j < 3; ++j) {
    const double lo = finger.joint_min[static_cast<size_t>(j)] - kClampMargin;
    const double hi = finger.joint_max[static_cast<size_t>(j)] + kClampMargin;
    if (qc[static_cast<size_t>(j)] < lo) {
      qc[static_cast<size_t>(j)] = lo;
      pose.clamped = true;
    } else if (qc[static_cast<size_t>(j)] > hi) {
      qc[static_cast<size_t>(j)] = hi;
      pose.clamped = true;
    }
  }

  const double fs = flex_sign(finger);
  Transform2 t{Rot2::from_angle(finger.base_angle), finger.base_pos};
  pose.to_world[0] = t;
  for (int j = 0; j < 3; ++j) {
    const Phalanx& prev = finger.phalanges[static_cast<size_t>(j)];
    const Vec2 joint = t.apply({prev.length, 0.0});
    pose.joint_world[static_cast<size_t>(j)] = joint;
    const Rot2 rot = Rot2::from_angle(fs * qc[static_cast<size_t>(j)]);
    t = Transform2{t.rot.compose(rot), joint};
    pose.to_world[static_cast<size_t>(j) + 1] = t;
  }
  return pose;
}

HandPose pose_hand(const HandModel& model, const std::vector<std::array<double, 3>>& q) {
  HandPose pose;
  pose.fingers.reserve(model.fingers.size());
  for (size_t i = 0; i < model.fingers.size(); ++i) {
    pose.fingers.push_back(forward_kinematics(model.fingers[i], q[i]));
  }
  return pose;
}

RouteGeometry route_geometry(const HandModel& model, const TendonRoute& route,
                             const HandPose& pose) {
  RouteGeometry g;
  const FingerPose& fp = pose.fingers[static_cast<size_t>(route.finger)];
  g.points.reserve(route.points.size());
  g.body.reserve(route.points.size());
  for (const RoutePoint& p : route.points) {
    g.body.push_back(p.body);
    g.points.push_back(p.body < 0 ? p.local
                                  : fp.to_world[static_cast<size_t>(p.body)].apply(p.local));
  }
  const size_t n = g.points.size();
  if (n < 2) return g;
  g.segment_length.resize(n - 1);
  for (size_t i = 0; i + 1 < n; ++i) {
    g.segment_length[i] = distance(g.points[i], g.points[i + 1]);
    g.length += g.segment_length[i];
  }
  g.wrap_angle.assign(n - 2, 0.0);
  // Wrap angle at an interior guide is the polyline turn angle. Degenerate
  // (near-zero) segments inherit the direction of the previous usable one.
  Vec2 prev_dir{0.0, 0.0};
  bool have_prev = false;
  size_t guide = 0;
  for (size_t i = 0; i + 1 < n; ++i) {
    const double len = g.segment_length[i];
    Vec2 dir = prev_dir;
    if (len > 1e-12) dir = (g.points[i + 1] - g.points[i]) * (1.0 / len);
    if (i > 0) {
      if (have_prev && len > 1e-12) {
        const double c = dot(prev_dir, dir);
        const double s = std::abs(cross(prev_dir, dir));
        g.wrap_angle[guide] = std::atan2(s, std::min(1.0, std::max(-1.0, c)));
      }
      ++guide;
    }
    if (len > 1e-12) {
      prev_dir = dir;
      have_prev = true;
    }
  }
  return g;
}

double tendon_path_length(const HandModel& model, const TendonRoute& route,
                          const HandPose& pose) {
  return route_geometry(model, route, pose).length;
}

std::vector<std::array<double, 3>> segment_length_derivatives(const RouteGeometry& geom,
                                                              const FingerPose& finger_pose,
                                                              double flex_sign) {
  const size_t nseg = geom.segment_length.size();
  std::vector<std::array<double, 3>> d(nseg, {0.0, 0.0, 0.0});
  for (size_t s = 0; s < nseg; ++s) {
    const double len = geom.segment_length[s];
    if (len <= 1e-12) continue;
    const Vec2& pa = geom.points[s];
    const Vec2& pb = geom.points[s + 1];
    const Vec2 u = (pb - pa) * (1.0 / len);
    const int body_a = geom.body[s];
    const int body_b = geom.body[s + 1];
    for (int j = 0; j < 3; ++j) {
      // Joint j sits between phalanx j and j+1; a point moves with it iff its
      // body is distal (body >= j+1). Both-distal contributions cancel.
      const Vec2& c = finger_pose.joint_world[static_cast<size_t>(j)];
      double v = 0.0;
      if (body_b >= j + 1) v += dot(u, perp(pb - c));
      if (body_a >= j + 1) v -= dot(u, perp(pa - c));
      d[s][static_cast<size_t>(j)] = flex_sign * v;
    }
  }
  return d;
}

std::array<double, 3> moment_arms(const HandModel& model, const TendonRoute& route,
                                  const std::array<double, 3>& q) {
  std::vector<std::array<double, 3>> all_q(model.fingers.size(), {0.0, 0.0, 0.0});
  all_q[static_cast<size_t>(route.finger)] = q;
  const HandPose pose = pose_hand(model, all_q);
  const RouteGeometry geom = route_geometry(model, route, pose);
  const FingerPose& fp = pose.fingers[static_cast<size_t>(route.finger)];
  const auto d = segment_length_derivatives(geom, fp,
                                            flex_sign(model.fingers[static_cast<size_t>(route.finger)]));
  std::array<double, 3> arms{0.0, 0.0, 0.0};
  for (const auto& seg : d)
    for (int j = 0; j < 3; ++j) arms[static_cast<size_t>(j)] -= seg[static_cast<size_t>(j)];
  return arms;
}

std::vector<double> tension_profile(const RouteGeometry& geom, double tension_at_spool,
                                    Sliding sliding, double mu, std::vector<double>* factors_io) {
  const size_t nseg = geom.segment_length.size();
  std::vector<double> t(nseg, 0.0);
  if (nseg == 0) return t;

  const bool have_prev = factors_io && factors_io->size() == nseg;
  if (sliding == Sliding::stuck && !have_prev) sliding = Sliding::winding;

  std::vector<double> factor(nseg, 1.0);
  double cum = 0.0;
  for (size_t s = 0; s < nseg; ++s) {
    if (s > 0) cum += geom.wrap_angle[s - 1];
    switch (sliding) {
      case Sliding::winding:
        factor[s] = std::exp(-mu * cum);
        break;
      case Sliding::paying_out:
        factor[s] = std::exp(mu * cum);
        break;
      case Sliding::stuck: {
        const double lo = std::exp(-mu * cum);
        const double hi = std::exp(mu * cum);
        const double prev = (*factors_io)[s];
        factor[s] = prev < lo ? lo : (prev > hi ? hi : prev);
        break;
      }
    }
    if (tension_at_spool > 0.0) t[s] = tension_at_spool * factor[s];
  }
  if (factors_io) *factors_io = std::move(factor);
  return t;
}

}  // namespace softhand

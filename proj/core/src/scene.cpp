#include "softhand/scene.hpp"

#include <algorithm>
#include <cmath>

#include "softhand/io_util.hpp"

namespace softhand {

HandConfig hand_config_from_settings(const HandSettings& s) {
  HandConfig cfg;
  cfg.joint_limit = s.joint_limit;
  cfg.pad_friction = s.pad_friction;
  cfg.beam_friction = s.beam_friction;
  cfg.spool_radius = s.spool_radius;
  cfg.clutch_slip_torque = s.clutch_slip_torque;
  cfg.motor_max_torque = s.motor_max_torque;
  cfg.motor_no_load_speed = s.motor_no_load_speed;
  cfg.tendon_stiffness = s.tendon_stiffness;
  cfg.guide_friction_mu = s.guide_friction_mu;
  cfg.joint_damping = s.joint_damping;
  cfg.aperture = s.aperture;
  cfg.rig_table_a = s.rig_table_a;
  cfg.rig_table_b = s.rig_table_b;
  return cfg;
}

HandModel build_scene_hand(const HandSettings& s) {
  const HandConfig cfg = hand_config_from_settings(s);
  return s.fingers == 1 ? build_single_finger_rig(cfg, s.rig_palm_up)
                        : build_default_hand(cfg);
}

Scene default_scene() {
  Scene scene;
  scene.hand = build_scene_hand(scene.hand_settings);
  return scene;
}

double shape_inertia(const Shape& shape, double mass) {
  double inertia_mm2 = 0.0;  // kg*mm^2
  if (const auto* c = std::get_if<CircleShape>(&shape)) {
    inertia_mm2 = 0.5 * mass * c->radius * c->radius;
  } else if (const auto* pg = std::get_if<PolygonShape>(&shape)) {
    const auto& v = pg->vertices;
    const size_t n = v.size();
    double area2 = 0.0;  // 2*A
    double j = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const Vec2& p = v[i];
      const Vec2& q = v[(i + 1) % n];
      const double c = cross(p, q);
      area2 += c;
      j += c * (dot(p, p) + dot(p, q) + dot(q, q));
    }
    const double area = 0.5 * area2;
    if (std::abs(area) > 1e-12) inertia_mm2 = mass * (j / 12.0) / area;
  } else if (const auto* cap = std::get_if<CapsuleShape>(&shape)) {
    const Vec2 axis = cap->b - cap->a;
    const double len = axis.norm();
    const double r = cap->radius;
    const double area_rect = 2.0 * r * len;
    const double area_ends = 3.14159265358979323846 * r * r;
    const double area = area_rect + area_ends;
    const double rho = area > 1e-12 ? mass / area : 0.0;
    const Vec2 mid = (cap->a + cap->b) * 0.5;
    // Rectangle about its centroid, then shifted to the origin.
    double inertia = rho * area_rect * (len * len + 4.0 * r * r) / 12.0 +
                     rho * area_rect * mid.norm_sq();
    // Each half-disc: polar moment about its flat-edge center, shifted
    // centroid-wise to the origin.
    const Vec2 u = len > 1e-12 ? axis * (1.0 / len) : Vec2{1.0, 0.0};
    const double half_area = 0.5 * area_ends;
    const double i_end = rho * 3.14159265358979323846 * r * r * r * r / 4.0;
    const double d_c = 4.0 * r / (3.0 * 3.14159265358979323846);
    for (int side = 0; side < 2; ++side) {
      const Vec2 end = side == 0 ? cap->a : cap->b;
      const Vec2 dir = side == 0 ? -u : u;
      const Vec2 centroid = end + dir * d_c;
      const double i_centroid = i_end - rho * half_area * d_c * d_c;
      inertia += i_centroid + rho * half_area * centroid.norm_sq();
    }
    inertia_mm2 = inertia;
  }
  const double inertia_m2 = inertia_mm2 * 1e-6;
  return inertia_m2 > 1e-9 ? inertia_m2 : 1e-9;
}

double shape_bounding_radius(const Shape& shape) {
  if (const auto* c = std::get_if<CircleShape>(&shape)) return c->radius;
  if (const auto* pg = std::get_if<PolygonShape>(&shape)) {
    double r = 0.0;
    for (const Vec2& v : pg->vertices) r = std::max(r, v.norm());
    return r;
  }
  const auto& cap = std::get<CapsuleShape>(shape);
  return std::max(cap.a.norm(), cap.b.norm()) + cap.radius;
}

std::string scene_fingerprint(const Scene& scene) {
  return hex64(fnv1a64(serialize_scene(scene)));
}

}  // namespace softhand

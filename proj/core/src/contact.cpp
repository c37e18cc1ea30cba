#include "softhand/contact.hpp"
#include <algorithm>

#include <algorithm>
#include <cmath>
#include <limits>

namespace softhand {

ShapeDistance segment_circle_distance(const Vec2& a, const Vec2& b, const Vec2& center) {
  ShapeDistance r;
  r.point_a = closest_point_on_segment(center, a, b);
  r.point_b = center;
  const Vec2 d = r.point_a - center;
  r.distance = d.norm();
  r.normal = r.distance > 1e-12 ? d * (1.0 / r.distance) : Vec2{0.0, 1.0};
  return r;
}

ShapeDistance segment_segment_distance(const Vec2& a1, const Vec2& b1, const Vec2& a2,
                                       const Vec2& b2) {
  ShapeDistance r;
  closest_points_segment_segment(a1, b1, a2, b2, r.point_a, r.point_b);
  const Vec2 d = r.point_a - r.point_b;
  r.distance = d.norm();
  r.normal = r.distance > 1e-12 ? d * (1.0 / r.distance) : Vec2{0.0, 1.0};
  return r;
}

namespace {

bool point_in_convex(const Vec2& p, const std::vector<Vec2>& poly) {
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& e0 = poly[i];
    const Vec2& e1 = poly[(i + 1) % n];
    if (cross(e1 - e0, p - e0) < 0.0) return false;  // CCW polygon
  }
  return true;
}

bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
  const double d1 = cross(q2 - q1, p1 - q1);
  const double d2 = cross(q2 - q1, p2 - q1);
  const double d3 = cross(p2 - p1, q1 - p1);
  const double d4 = cross(p2 - p1, q2 - p1);
  return ((d1 > 0.0) != (d2 > 0.0)) && ((d3 > 0.0) != (d4 > 0.0));
}

}  // namespace

ShapeDistance segment_polygon_distance(const Vec2& a, const Vec2& b,
                                       const std::vector<Vec2>& poly) {
  ShapeDistance best;
  const size_t n = poly.size();

  bool overlapping = point_in_convex(a, poly) || point_in_convex(b, poly);
  if (!overlapping) {
    for (size_t i = 0; i < n && !overlapping; ++i) {
      overlapping = segments_intersect(a, b, poly[i], poly[(i + 1) % n]);
    }
  }

  if (!overlapping) {
    best.distance = std::numeric_limits<double>::max();
    for (size_t i = 0; i < n; ++i) {
      ShapeDistance d = segment_segment_distance(a, b, poly[i], poly[(i + 1) % n]);
      if (d.distance < best.distance) best = d;
    }
    return best;
  }

  // Cores overlap: minimum translation along polygon edge normals or the
  // segment's own perpendicular.
  double best_depth = std::numeric_limits<double>::max();
  Vec2 best_normal{0.0, 1.0};
  auto consider = [&](const Vec2& axis) {
    // axis points polygon -> segment; depth = overlap along it.
    double poly_max = -std::numeric_limits<double>::max();
    for (const Vec2& v : poly) poly_max = std::max(poly_max, dot(v, axis));
    const double seg_min = std::min(dot(a, axis), dot(b, axis));
    const double depth = poly_max - seg_min;
    if (depth < best_depth) {
      best_depth = depth;
      best_normal = axis;
    }
  };
  for (size_t i = 0; i < n; ++i) {
    const Vec2 e = poly[(i + 1) % n] - poly[i];
    const double len = e.norm();
    if (len < 1e-12) continue;
    consider(Vec2{e.y / len, -e.x / len});  // outward normal of a CCW edge
  }
  const Vec2 seg = b - a;
  const double seg_len = seg.norm();
  if (seg_len > 1e-12) {
    const Vec2 sn = perp(seg) * (1.0 / seg_len);
    consider(sn);
    consider(-sn);
  }

  best.normal = best_normal;
  best.distance = -best_depth;
  best.point_a = dot(a, best_normal) < dot(b, best_normal) ? a : b;
  best.point_b = best.point_a + best_normal * best_depth;
  return best;
}

namespace {

struct WorldShape {
  const ObjectSpec* spec = nullptr;
  Vec2 circle_center;
  Vec2 cap_a, cap_b;
  std::vector<Vec2> poly;
};

WorldShape world_shape(const ObjectSpec& spec, const ObjectPose& pose) {
  WorldShape w;
  w.spec = &spec;
  const Transform2 t{Rot2::from_angle(pose.angle), pose.position};
  if (std::holds_alternative<CircleShape>(spec.shape)) {
    w.circle_center = pose.position;
  } else if (const auto* cap = std::get_if<CapsuleShape>(&spec.shape)) {
    w.cap_a = t.apply(cap->a);
    w.cap_b = t.apply(cap->b);
  } else {
    const auto& pg = std::get<PolygonShape>(spec.shape);
    w.poly.reserve(pg.vertices.size());
    for (const Vec2& v : pg.vertices) w.poly.push_back(t.apply(v));
  }
  return w;
}

// Core distance between a finger capsule axis and the object core, plus the
// object's own surface inflation.
ShapeDistance core_distance(const Vec2& a, const Vec2& b, const WorldShape& w,
                            double* object_radius) {
  if (std::holds_alternative<CircleShape>(w.spec->shape)) {
    *object_radius = std::get<CircleShape>(w.spec->shape).radius;
    return segment_circle_distance(a, b, w.circle_center);
  }
  if (const auto* cap = std::get_if<CapsuleShape>(&w.spec->shape)) {
    *object_radius = cap->radius;
    return segment_segment_distance(a, b, w.cap_a, w.cap_b);
  }
  *object_radius = 0.0;
  return segment_polygon_distance(a, b, w.poly);
}

void emit_contact(std::vector<ContactPoint>& out, const Vec2& a, const Vec2& b,
                  double capsule_radius, const WorldShape& w, int object_index,
                  double surface_mu, int finger, int phalanx, bool palm) {
  double obj_radius = 0.0;
  const ShapeDistance d = core_distance(a, b, w, &obj_radius);
  const double depth = capsule_radius + obj_radius - d.distance;
  if (!(depth > 0.0)) return;
  ContactPoint c;
  c.depth = depth;
  c.normal = d.normal;
  const Vec2 finger_surface = d.point_a - d.normal * capsule_radius;
  const Vec2 object_surface = d.point_b + d.normal * obj_radius;
  c.position = (finger_surface + object_surface) * 0.5;
  c.mu = std::sqrt(surface_mu * w.spec->friction);
  c.finger = finger;
  c.phalanx = phalanx;
  c.palm = palm;
  c.object = object_index;
  out.push_back(c);
}

}  // namespace

std::vector<ContactPoint> detect_contacts(const HandModel& model, const HandPose& pose,
                                          const std::vector<ObjectSpec>& objects,
                                          const std::vector<ObjectPose>& poses) {
  std::vector<ContactPoint> out;
  for (size_t oi = 0; oi < objects.size(); ++oi) {
    const WorldShape w = world_shape(objects[oi], poses[oi]);
    emit_contact(out, model.palm.a, model.palm.b, model.palm.radius, w, static_cast<int>(oi),
                 model.palm_friction, -1, -1, true);
    for (size_t fi = 0; fi < model.fingers.size(); ++fi) {
      const Finger& finger = model.fingers[fi];
      for (int pi = 0; pi < 4; ++pi) {
        const Phalanx& ph = finger.phalanges[static_cast<size_t>(pi)];
        const Transform2& t = pose.fingers[fi].to_world[static_cast<size_t>(pi)];
        const Vec2 a = t.apply({0.0, 0.0});
        const Vec2 b = t.apply({ph.length, 0.0});
        emit_contact(out, a, b, model.phalanx_half_width, w, static_cast<int>(oi),
                     ph.pad_friction, static_cast<int>(fi), pi, false);
      }
    }
  }
  return out;
}

namespace {

double clamp_sym(double v, double limit) {
  return v > limit ? limit : (v < -limit ? -limit : v);
}

}  // namespace

void contact_forces(std::vector<ContactPoint>& contacts,
                    const std::vector<ContactKinematics>& kinematics,
                    const ContactParams& params, ContactMemoryMap* memory, double dt) {
  ContactMemoryMap next;
  for (size_t i = 0; i < contacts.size(); ++i) {
    ContactPoint& c = contacts[i];
    const Vec2 v = kinematics[i].v_rel;
    const double v_n = dot(v, c.normal);
    const double elastic = params.k_n * c.depth;
    double fn = elastic;
    // Compression-only damping, bounded by the elastic force so a fresh
    // fast contact cannot apply an impulsive kick.
    if (v_n < 0.0) fn += std::min(params.c_n * (-v_n), elastic);
    c.normal_force = fn > 0.0 ? fn : 0.0;

    const double v_t = dot(v, perp(c.normal));
    const double w = kinematics[i].omega_rel;
    const double limit = c.mu * c.normal_force;
    const double spin_limit = limit * params.patch_radius * 1e-3;

    if (memory) {
      ContactMemory mem;
      if (auto it = memory->find(contact_pair_key(c)); it != memory->end()) mem = it->second;
      mem.tangent_stretch += v_t * dt;
      double ft = clamp_sym(-(params.k_t * mem.tangent_stretch + params.c_t * v_t), limit);
      mem.tangent_stretch = params.k_t > 0.0 ? -(ft + params.c_t * v_t) / params.k_t : 0.0;
      c.tangent_force = ft;

      mem.spin_twist += w * dt;
      double ms = clamp_sym(-(params.k_spin * mem.spin_twist + params.c_spin * w), spin_limit);
      mem.spin_twist = params.k_spin > 0.0 ? -(ms + params.c_spin * w) / params.k_spin : 0.0;
      c.spin_moment = ms;
      next[contact_pair_key(c)] = mem;
    } else {
      c.tangent_force = clamp_sym(-params.c_t * v_t, limit);
      c.spin_moment = clamp_sym(-params.c_spin * w, spin_limit);
    }
  }
  if (memory) *memory = std::move(next);
}

}  // namespace softhand

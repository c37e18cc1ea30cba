#pragma once

#include <map>
#include <vector>

#include "softhand/kinematics.hpp"
#include "softhand/scene.hpp"

namespace softhand {

// Planar contact between hand geometry (phalanx capsules, palm capsule) and
// convex objects. Penalty normal force plus regularized Coulomb friction.

struct ContactPoint {
  Vec2 position;          // world mm, midway between the two surfaces
  Vec2 normal;            // unit, object -> finger
  double depth = 0.0;     // mm penetration, > 0
  double normal_force = 0.0;   // N, along +normal on the finger
  double tangent_force = 0.0;  // N, along perp(normal) on the finger
  double spin_moment = 0.0;    // N*m couple on the finger, finite-patch friction
  double mu = 0.5;
  int finger = -1;        // -1 with palm=true for palm contacts
  int phalanx = -1;
  bool palm = false;
  int object = -1;
};

struct ContactParams {
  double k_n = 3.0;    // N/mm
  double c_n = 0.02;   // N*s/mm, compression-only viscous term
  // Bristle (anchored-spring) stick regularization; the viscous terms damp it.
  double k_t = 20.0;   // N/mm tangential bristle stiffness
  double c_t = 0.02;   // N*s/mm
  double k_spin = 0.5;   // N*m/rad torsional bristle stiffness
  double c_spin = 0.001; // N*m*s/rad
  double patch_radius = 3.0;  // mm, torsional friction lever of the contact patch
};

struct ContactKinematics {
  Vec2 v_rel;             // finger point velocity minus object point velocity, mm/s
  double omega_rel = 0.0; // finger body rate minus object rate, rad/s
};

// Per-pair friction anchor state, keyed by (object, contact surface). The
// stretch saturates at the Coulomb limit and is forgotten when the pair
// separates.
struct ContactMemory {
  double tangent_stretch = 0.0;  // mm
  double spin_twist = 0.0;       // rad
};
using ContactMemoryMap = std::map<int, ContactMemory>;

inline int contact_pair_key(const ContactPoint& c) {
  const int body = c.palm ? 31 : c.finger * 4 + c.phalanx;
  return c.object * 32 + body;
}

// Signed distance between the cores of two convex shapes is resolved through
// these primitives; a contact is the capsule-inflated overlap.
struct ShapeDistance {
  double distance = 0.0;  // between cores; negative = cores penetrate
  Vec2 point_a;           // closest/deepest point on shape A's core
  Vec2 point_b;           // on shape B's core
  Vec2 normal;            // unit, B -> A (valid also when penetrating)
};

ShapeDistance segment_circle_distance(const Vec2& a, const Vec2& b, const Vec2& center);
ShapeDistance segment_segment_distance(const Vec2& a1, const Vec2& b1, const Vec2& a2,
                                       const Vec2& b2);
// Convex CCW polygon. Handles seg-core inside the polygon via axis separation.
ShapeDistance segment_polygon_distance(const Vec2& a, const Vec2& b,
                                       const std::vector<Vec2>& poly_world);

// Geometry-only query: deepest point per phalanx-segment/object pair and per
// palm/object pair, forces zeroed. Object poses come from the caller (they
// move); vertices are transformed here.
struct ObjectPose {
  Vec2 position;
  double angle = 0.0;
};

std::vector<ContactPoint> detect_contacts(const HandModel& model, const HandPose& pose,
                                          const std::vector<ObjectSpec>& objects,
                                          const std::vector<ObjectPose>& poses);

// Fills normal/tangent forces and the patch spin moment from the relative
// surface motion at each contact. With memory, friction is a bristle model
// that truly sticks; without it, a purely viscous regularization (dt only
// matters with memory).
void contact_forces(std::vector<ContactPoint>& contacts,
                    const std::vector<ContactKinematics>& kinematics,
                    const ContactParams& params, ContactMemoryMap* memory = nullptr,
                    double dt = 0.0);

}  // namespace softhand

#include <string>

#include "softhand/io_util.hpp"
#include "softhand/scene.hpp"

namespace softhand {

namespace {

std::string num(double v) { return fmt_g6(v); }

void emit_block(std::string& out, const JointBlock& b) {
  out += "block b" + std::to_string(b.finger) + " {\n";
  out += "  finger " + std::to_string(b.finger) + ";\n";
  out += "  fraction " + num(b.fraction[0]) + " " + num(b.fraction[1]) + " " +
         num(b.fraction[2]) + ";\n";
  out += "}\n";
}

void emit_control(std::string& out, const std::vector<MotorCommand>& control) {
  out += "control {\n";
  for (const MotorCommand& c : control) {
    out += "  at " + num(c.t) + " ";
    out += c.motor == MotorId::agonist ? "agonist" : "antagonist";
    if (c.hold)
      out += " hold;\n";
    else
      out += " speed " + num(c.speed) + ";\n";
  }
  out += "}\n";
}

void emit_hand(std::string& out, const HandSettings& h) {
  out += "hand {\n";
  out += "  fingers " + std::to_string(h.fingers) + ";\n";
  out += std::string("  rig_palm_up ") + (h.rig_palm_up ? "true" : "false") + ";\n";
  out += "  rig_table " + num(h.rig_table_a.x) + " " + num(h.rig_table_a.y) + " " +
         num(h.rig_table_b.x) + " " + num(h.rig_table_b.y) + ";\n";
  out += "  initial_q " + num(h.initial_q) + ";\n";
  out += "  aperture " + num(h.aperture) + ";\n";
  out += "  beam_friction " + num(h.beam_friction) + ";\n";
  out += "  clutch_slip_torque " + num(h.clutch_slip_torque) + ";\n";
  out += "  guide_friction_mu " + num(h.guide_friction_mu) + ";\n";
  out += "  joint_damping " + num(h.joint_damping) + ";\n";
  out += "  joint_limit " + num(h.joint_limit) + ";\n";
  out += "  motor_max_torque " + num(h.motor_max_torque) + ";\n";
  out += "  motor_no_load_speed " + num(h.motor_no_load_speed) + ";\n";
  out += "  pad_friction " + num(h.pad_friction) + ";\n";
  out += "  spool_radius " + num(h.spool_radius) + ";\n";
  out += "  tendon_stiffness " + num(h.tendon_stiffness) + ";\n";
  out += "}\n";
}

void emit_load(std::string& out, const PointLoad& l) {
  out += "load " + l.name + " {\n";
  out += "  finger " + std::to_string(l.finger) + ";\n";
  out += "  phalanx " + std::to_string(l.phalanx) + ";\n";
  out += "  at " + num(l.local.x) + " " + num(l.local.y) + ";\n";
  out += "  force " + num(l.force.x) + " " + num(l.force.y) + ";\n";
  out += "}\n";
}

void emit_object(std::string& out, const ObjectSpec& o) {
  out += "object " + o.name + " {\n";
  if (const auto* c = std::get_if<CircleShape>(&o.shape)) {
    out += "  circle " + num(c->radius) + ";\n";
  } else if (const auto* cap = std::get_if<CapsuleShape>(&o.shape)) {
    out += "  capsule " + num(cap->a.x) + " " + num(cap->a.y) + " " + num(cap->b.x) + " " +
           num(cap->b.y) + " " + num(cap->radius) + ";\n";
  } else {
    const auto& poly = std::get<PolygonShape>(o.shape);
    out += "  polygon";
    for (const Vec2& v : poly.vertices) out += " " + num(v.x) + " " + num(v.y);
    out += ";\n";
  }
  out += "  mass " + num(o.mass) + ";\n";
  out += "  pose " + num(o.position.x) + " " + num(o.position.y) + " " + num(o.angle) + ";\n";
  out += o.mobile ? "  mobile;\n" : "  fixed;\n";
  out += "  friction " + num(o.friction) + ";\n";
  out += "}\n";
}

void emit_sim(std::string& out, const SimParams& s) {
  out += "sim {\n";
  out += "  contact_stiffness " + num(s.contact_stiffness) + ";\n";
  out += "  dt " + num(s.dt) + ";\n";
  out += "  equilibrium_tol " + num(s.equilibrium_tol) + ";\n";
  out += "  qdot_limit " + num(s.qdot_limit) + ";\n";
  out += "  stop_stiffness " + num(s.stop_stiffness) + ";\n";
  out += "  t_end " + num(s.t_end) + ";\n";
  out += "  trace_every " + std::to_string(s.trace_every) + ";\n";
  out += "}\n";
}

}  // namespace

std::string serialize_scene(const Scene& scene) {
  // Canonical form: sections in fixed (alphabetical) order, objects/loads
  // sorted by name, every key explicit, numbers at 6 significant digits.
  std::string out;
  for (const JointBlock& b : scene.blocks) emit_block(out, b);
  emit_control(out, scene.control);
  out += "gravity {\n  x " + num(scene.gravity.x) + ";\n  y " + num(scene.gravity.y) + ";\n}\n";
  emit_hand(out, scene.hand_settings);
  for (const PointLoad& l : scene.loads) emit_load(out, l);
  for (const ObjectSpec& o : scene.objects) emit_object(out, o);
  emit_sim(out, scene.sim);
  return out;
}

}  // namespace softhand

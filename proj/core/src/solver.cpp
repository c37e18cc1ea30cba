#include "softhand/solver.hpp"

#include <algorithm>
#include <cmath>

namespace softhand {

namespace {

constexpr double kObjVelLimit = 1e6;      // mm/s blowup guard
constexpr double kObjOmegaLimit = 1e4;    // rad/s

struct RouteScratch {
  RouteGeometry geom;
  std::vector<std::array<double, 3>> dlen;  // per segment, mm/rad
};

std::vector<RouteScratch> route_scratch(const HandModel& model, const HandPose& pose) {
  std::vector<RouteScratch> out(model.routes.size());
  for (size_t r = 0; r < model.routes.size(); ++r) {
    const TendonRoute& route = model.routes[r];
    out[r].geom = route_geometry(model, route, pose);
    out[r].dlen = segment_length_derivatives(
        out[r].geom, pose.fingers[static_cast<size_t>(route.finger)],
        flex_sign(model.fingers[static_cast<size_t>(route.finger)]));
  }
  return out;
}

bool finger_blocked(const Scene& scene, int finger) {
  for (const JointBlock& b : scene.blocks)
    if (b.finger == finger) return true;
  return false;
}

// Velocity of a phalanx-fixed world point from the joint rates.
Vec2 finger_point_velocity(const FingerPose& fp, double fs, const std::array<double, 3>& qdot,
                           int phalanx, const Vec2& point) {
  Vec2 v{0.0, 0.0};
  for (int j = 0; j < 3; ++j) {
    if (phalanx >= j + 1)
      v += fs * qdot[static_cast<size_t>(j)] * perp(point - fp.joint_world[static_cast<size_t>(j)]);
  }
  return v;
}

struct MotorCommandNow {
  bool hold = true;
  double speed = 0.0;
};

MotorCommandNow command_at(const Scene& scene, MotorId motor, double t) {
  MotorCommandNow cmd;
  for (const MotorCommand& c : scene.control) {
    if (c.motor != motor) continue;
    if (c.t <= t + 1e-12) {
      cmd.hold = c.hold;
      cmd.speed = c.speed;
    }
  }
  return cmd;
}

}  // namespace

const char* to_string(SimStatus s) {
  switch (s) {
    case SimStatus::ok: return "ok";
    case SimStatus::reached_t_end: return "reached_t_end";
    case SimStatus::equilibrium: return "equilibrium";
    case SimStatus::equilibrium_not_reached: return "equilibrium_not_reached";
    case SimStatus::numerical_blowup: return "numerical_blowup";
  }
  return "unknown";
}

SimState init_state(const Scene& scene) {
  const HandModel& model = scene.hand;
  SimState state;
  state.q.assign(model.fingers.size(), {0.0, 0.0, 0.0});
  state.qdot.assign(model.fingers.size(), {0.0, 0.0, 0.0});
  for (size_t fi = 0; fi < model.fingers.size(); ++fi) {
    const Finger& f = model.fingers[fi];
    for (int j = 0; j < 3; ++j) {
      const size_t js = static_cast<size_t>(j);
      state.q[fi][js] = std::clamp(scene.hand_settings.initial_q, f.joint_min[js],
                                   f.joint_max[js]);
    }
  }
  for (const JointBlock& b : scene.blocks) {
    if (b.finger < 0 || b.finger >= static_cast<int>(model.fingers.size())) continue;
    const Finger& f = model.fingers[static_cast<size_t>(b.finger)];
    for (int j = 0; j < 3; ++j) {
      const size_t js = static_cast<size_t>(j);
      state.q[static_cast<size_t>(b.finger)][js] =
          f.joint_min[js] + b.fraction[js] * (f.joint_max[js] - f.joint_min[js]);
    }
  }
  state.pose = pose_hand(model, state.q);

  state.objects.reserve(scene.objects.size());
  for (const ObjectSpec& o : scene.objects)
    state.objects.push_back(ObjectState{o.position, o.angle, {0.0, 0.0}, 0.0});

  state.clutches.assign(model.routes.size(), ClutchState{});
  state.spools.assign(model.routes.size(), SpoolState{});
  state.tendons.assign(model.routes.size(), TendonState{});
  state.contact_k_joint.assign(model.fingers.size(), {0.0, 0.0, 0.0});
  state.contact_c_joint.assign(model.fingers.size(), {0.0, 0.0, 0.0});
  state.contact_k_obj_lin.assign(scene.objects.size(), 0.0);
  state.contact_k_obj_ang.assign(scene.objects.size(), 0.0);
  state.contact_c_obj_lin.assign(scene.objects.size(), 0.0);
  state.contact_c_obj_ang.assign(scene.objects.size(), 0.0);
  const auto scratch = route_scratch(model, state.pose);
  for (size_t r = 0; r < model.routes.size(); ++r) {
    // Spools start where the tendon is exactly taut at the initial posture,
    // as if the mechanism were assembled there.
    SpoolState& spool = state.spools[r];
    spool.tendon = static_cast<int>(r);
    const double radius = model.drive.spools[r].radius;
    spool.wound_length = model.routes[r].rest_length - scratch[r].geom.length;
    spool.angle = spool.wound_length / radius;

    TendonState& ts = state.tendons[r];
    ts.path_length = scratch[r].geom.length;
    ts.commanded_length = model.routes[r].rest_length - spool.wound_length;
    ts.stretch = std::max(0.0, ts.path_length - ts.commanded_length);
    ts.tension_at_spool = model.tendon_stiffness * ts.stretch;
    ts.slack = ts.path_length < ts.commanded_length;
    ts.sliding = Sliding::stuck;
    ts.segment_tension =
        tension_profile(scratch[r].geom, ts.tension_at_spool, Sliding::stuck,
                        model.guide_friction_mu, &ts.segment_factor);
  }
  return state;
}

SimStatus quasi_static_step(SimState& state, const Scene& scene, double dt) {
  const HandModel& model = scene.hand;
  const size_t nf = model.fingers.size();
  const double k_n = scene.sim.contact_stiffness;
  const double k_stop = scene.sim.stop_stiffness;
  ContactParams cparams;
  cparams.k_n = k_n;

  // Contacts from the current pose, with forces from the current rates.
  std::vector<ObjectPose> obj_poses;
  obj_poses.reserve(state.objects.size());
  for (const ObjectState& o : state.objects) obj_poses.push_back({o.position, o.angle});
  std::vector<ContactPoint> contacts =
      detect_contacts(model, state.pose, scene.objects, obj_poses);

  std::vector<ContactKinematics> rel_kin(contacts.size());
  for (size_t i = 0; i < contacts.size(); ++i) {
    const ContactPoint& c = contacts[i];
    Vec2 vf{0.0, 0.0};
    double wf = 0.0;
    if (!c.palm) {
      const Finger& finger = model.fingers[static_cast<size_t>(c.finger)];
      const double fs = flex_sign(finger);
      vf = finger_point_velocity(state.pose.fingers[static_cast<size_t>(c.finger)], fs,
                                 state.qdot[static_cast<size_t>(c.finger)], c.phalanx,
                                 c.position);
      for (int j = 0; j < 3; ++j)
        if (c.phalanx >= j + 1)
          wf += fs * state.qdot[static_cast<size_t>(c.finger)][static_cast<size_t>(j)];
    }
    const ObjectState& o = state.objects[static_cast<size_t>(c.object)];
    rel_kin[i].v_rel = vf - (o.velocity + o.omega * perp(c.position - o.position));
    rel_kin[i].omega_rel = wf - o.omega;
  }
  contact_forces(contacts, rel_kin, cparams, &state.contact_memory, dt);

  const auto scratch = route_scratch(model, state.pose);

  // Joint torques (N*m, flexion coordinates) and implicit diagonal stiffness.
  std::vector<std::array<double, 3>> torque(nf, {0.0, 0.0, 0.0});
  std::vector<std::array<double, 3>> k_diag(nf, {0.0, 0.0, 0.0});

  for (size_t r = 0; r < model.routes.size(); ++r) {
    const TendonRoute& route = model.routes[r];
    const size_t fi = static_cast<size_t>(route.finger);
    const auto& tension = state.tendons[r].segment_tension;
    std::array<double, 3> total_dlen{0.0, 0.0, 0.0};
    for (size_t s = 0; s < scratch[r].dlen.size(); ++s) {
      for (int j = 0; j < 3; ++j) {
        const size_t js = static_cast<size_t>(j);
        torque[fi][js] -= tension[s] * scratch[r].dlen[s][js] * 1e-3;
        total_dlen[js] += scratch[r].dlen[s][js];
      }
    }
    if (state.tendons[r].tension_at_spool > 0.0) {
      for (int j = 0; j < 3; ++j) {
        const size_t js = static_cast<size_t>(j);
        k_diag[fi][js] += model.tendon_stiffness * total_dlen[js] * total_dlen[js] * 1e-3;
      }
    }
  }

  // Contact stiffness and damping per joint, with one-step hysteresis so the
  // implicit terms persist across contact dropouts. The damping coefficients
  // of the contact model are folded into the implicit denominator; computing
  // their forces from stale rates would otherwise destabilize the coupling.
  const double c_contact = cparams.c_t + cparams.c_n;
  std::vector<std::array<double, 3>> contact_k_now(nf, {0.0, 0.0, 0.0});
  std::vector<std::array<double, 3>> contact_c_now(nf, {0.0, 0.0, 0.0});
  for (const ContactPoint& c : contacts) {
    if (c.palm) continue;
    const size_t fi = static_cast<size_t>(c.finger);
    const Finger& finger = model.fingers[fi];
    const double fs = flex_sign(finger);
    const Vec2 force = c.normal_force * c.normal + c.tangent_force * perp(c.normal);
    const FingerPose& fp = state.pose.fingers[fi];
    for (int j = 0; j < 3; ++j) {
      if (c.phalanx < j + 1) continue;
      const size_t js = static_cast<size_t>(j);
      const Vec2 lever = c.position - fp.joint_world[js];
      torque[fi][js] += fs * (cross(lever, force) * 1e-3 + c.spin_moment);
      contact_k_now[fi][js] += (k_n + cparams.k_t) * lever.norm_sq() * 1e-3;
      contact_c_now[fi][js] += c_contact * lever.norm_sq() * 1e-3 + cparams.c_spin;
    }
  }
  std::vector<std::array<double, 3>> damping_diag(nf, {0.0, 0.0, 0.0});
  for (size_t fi = 0; fi < nf; ++fi) {
    for (int j = 0; j < 3; ++j) {
      const size_t js = static_cast<size_t>(j);
      k_diag[fi][js] += std::max(contact_k_now[fi][js], state.contact_k_joint[fi][js]);
      damping_diag[fi][js] = std::max(contact_c_now[fi][js], state.contact_c_joint[fi][js]);
    }
  }
  state.contact_k_joint = contact_k_now;
  state.contact_c_joint = contact_c_now;

  for (const PointLoad& load : scene.loads) {
    if (load.finger < 0 || load.finger >= static_cast<int>(nf)) continue;
    const size_t fi = static_cast<size_t>(load.finger);
    const FingerPose& fp = state.pose.fingers[fi];
    const Vec2 point = fp.to_world[static_cast<size_t>(load.phalanx)].apply(load.local);
    const double fs = flex_sign(model.fingers[fi]);
    for (int j = 0; j < 3; ++j) {
      if (load.phalanx < j + 1) continue;
      const size_t js = static_cast<size_t>(j);
      torque[fi][js] += fs * cross(point - fp.joint_world[js], load.force) * 1e-3;
    }
  }

  for (size_t fi = 0; fi < nf; ++fi) {
    const Finger& finger = model.fingers[fi];
    for (int j = 0; j < 3; ++j) {
      const size_t js = static_cast<size_t>(j);
      const double q = state.q[fi][js];
      if (q > finger.joint_max[js]) {
        torque[fi][js] -= k_stop * (q - finger.joint_max[js]);
        k_diag[fi][js] += k_stop;
      } else if (q < finger.joint_min[js]) {
        torque[fi][js] -= k_stop * (q - finger.joint_min[js]);
        k_diag[fi][js] += k_stop;
      }
    }
  }

  // Joint integration: overdamped rate with the local stiffness treated
  // implicitly, q_dot = tau / (b + dt*k).
  double max_joint_residual = 0.0;
  for (size_t fi = 0; fi < nf; ++fi) {
    const bool blocked = finger_blocked(scene, static_cast<int>(fi));
    for (int j = 0; j < 3; ++j) {
      const size_t js = static_cast<size_t>(j);
      if (blocked) {
        state.qdot[fi][js] = 0.0;
        continue;
      }
      max_joint_residual = std::max(max_joint_residual, std::abs(torque[fi][js]));
      const double qdot = torque[fi][js] /
                          (model.joint_damping + damping_diag[fi][js] + dt * k_diag[fi][js]);
      if (std::abs(qdot) > scene.sim.qdot_limit) return SimStatus::numerical_blowup;
      state.qdot[fi][js] = qdot;
      state.q[fi][js] += qdot * dt;
    }
  }

  // Object integration: strongly damped planar dynamics, damping and contact
  // stiffness implicit.
  double max_object_residual = 0.0;
  for (size_t oi = 0; oi < state.objects.size(); ++oi) {
    const ObjectSpec& spec = scene.objects[oi];
    ObjectState& obj = state.objects[oi];
    if (!spec.mobile) continue;

    Vec2 force = spec.mass * scene.gravity;  // N
    double torque_nm = 0.0;
    double k_sum = 0.0;     // N/mm
    double k_ang_sum = 0.0; // N*m/rad
    double c_sum = 0.0;     // N*s/mm
    double c_ang_sum = 0.0; // N*m*s/rad
    for (const ContactPoint& c : contacts) {
      if (c.object != static_cast<int>(oi)) continue;
      const Vec2 f_on_object = -(c.normal_force * c.normal + c.tangent_force * perp(c.normal));
      force += f_on_object;
      const Vec2 lever = c.position - obj.position;
      torque_nm += cross(lever, f_on_object) * 1e-3 - c.spin_moment;
      k_sum += k_n + cparams.k_t;
      k_ang_sum += (k_n + cparams.k_t) * lever.norm_sq() * 1e-3;
      c_sum += c_contact;
      c_ang_sum += c_contact * lever.norm_sq() * 1e-3 + cparams.c_spin;
    }
    max_object_residual =
        std::max(max_object_residual, std::abs(torque_nm) + force.norm() * kCharLength);

    const double k_lin = std::max(k_sum, state.contact_k_obj_lin[oi]);
    const double k_ang = std::max(k_ang_sum, state.contact_k_obj_ang[oi]);
    const double c_lin_contact = std::max(c_sum, state.contact_c_obj_lin[oi]);
    const double c_ang_contact = std::max(c_ang_sum, state.contact_c_obj_ang[oi]);
    state.contact_k_obj_lin[oi] = k_sum;
    state.contact_k_obj_ang[oi] = k_ang_sum;
    state.contact_c_obj_lin[oi] = c_sum;
    state.contact_c_obj_ang[oi] = c_ang_sum;

    const double inertia = shape_inertia(spec.shape, spec.mass);
    // Near-critical damping against the contact stiffness; objects spawn
    // resting so free-fall speed is irrelevant.
    const double c_lin = 2.0 * std::sqrt(spec.mass * k_n / 1000.0);
    const double c_ang = 2.0 * std::sqrt(inertia * k_n * 2.5);
    const double inv_m = 1000.0 / spec.mass;  // (mm/s^2) per N

    obj.velocity = (obj.velocity + dt * inv_m * force) *
                   (1.0 / (1.0 + dt * inv_m * (c_lin + c_lin_contact + dt * k_lin)));
    obj.position += obj.velocity * dt;
    obj.omega = (obj.omega + dt * torque_nm / inertia) /
                (1.0 + dt * (c_ang + c_ang_contact + dt * k_ang) / inertia);
    obj.angle += obj.omega * dt;
    if (obj.velocity.norm() > kObjVelLimit || std::abs(obj.omega) > kObjOmegaLimit)
      return SimStatus::numerical_blowup;
  }

  // Kinematics at the new configuration, then the drive train and tendons.
  state.pose = pose_hand(model, state.q);
  std::vector<double> new_path(model.routes.size());
  std::vector<RouteGeometry> new_geom(model.routes.size());
  for (size_t r = 0; r < model.routes.size(); ++r) {
    new_geom[r] = route_geometry(model, model.routes[r], state.pose);
    new_path[r] = new_geom[r].length;
  }

  for (int shaft = 0; shaft < 2; ++shaft) {
    std::vector<size_t> idx;
    for (size_t r = 0; r < model.drive.spools.size(); ++r)
      if (model.drive.spools[r].shaft == shaft) idx.push_back(r);
    if (idx.empty()) continue;

    std::vector<ClutchState> clutches(idx.size());
    std::vector<SpoolState> spools(idx.size());
    std::vector<double> paths(idx.size()), rests(idx.size()), radii(idx.size()), slips(idx.size());
    for (size_t i = 0; i < idx.size(); ++i) {
      clutches[i] = state.clutches[idx[i]];
      spools[i] = state.spools[idx[i]];
      paths[i] = new_path[idx[i]];
      rests[i] = model.routes[idx[i]].rest_length;
      radii[i] = model.drive.spools[idx[i]].radius;
      slips[i] = model.drive.clutches[model.drive.spools[idx[i]].clutch].slip_torque;
    }
    const MotorCommandNow cmd =
        command_at(scene, shaft == 0 ? MotorId::agonist : MotorId::antagonist, state.t);
    ShaftStepInput in;
    in.command = cmd.speed;
    in.hold = cmd.hold;
    in.dt = dt;
    in.tendon_stiffness = model.tendon_stiffness;
    in.path_length = paths;
    in.rest_length = rests;
    in.spool_radius = radii;
    in.slip_torque = slips;
    shaft_step(state.motors[static_cast<size_t>(shaft)], clutches, spools, in,
               model.drive.motors[static_cast<size_t>(shaft)]);
    for (size_t i = 0; i < idx.size(); ++i) {
      state.clutches[idx[i]] = clutches[i];
      state.spools[idx[i]] = spools[i];
    }
  }

  for (size_t r = 0; r < model.routes.size(); ++r) {
    TendonState& ts = state.tendons[r];
    const double prev_path = ts.path_length;
    ts.path_length = new_path[r];
    ts.commanded_length = model.routes[r].rest_length - state.spools[r].wound_length;
    ts.stretch = std::max(0.0, ts.path_length - ts.commanded_length);
    ts.tension_at_spool = model.tendon_stiffness * ts.stretch;
    ts.slack = ts.path_length < ts.commanded_length;
    // Leaky relay: sustained sliding pins the accumulator at a rail; at
    // standstill it decays back inside the band and the tendon sticks.
    ts.slide_accum = std::clamp(ts.slide_accum * (1.0 - dt / 0.2) +
                                    (ts.path_length - prev_path),
                                -kSlideBand, kSlideBand);
    if (ts.slide_accum <= -kSlideBand)
      ts.sliding = Sliding::winding;
    else if (ts.slide_accum >= kSlideBand)
      ts.sliding = Sliding::paying_out;
    else
      ts.sliding = Sliding::stuck;
    ts.segment_tension = tension_profile(new_geom[r], ts.tension_at_spool, ts.sliding,
                                         model.guide_friction_mu, &ts.segment_factor);
  }

  // Diagnostics.
  state.contacts = std::move(contacts);
  state.diag.max_joint_residual = max_joint_residual;
  state.diag.max_object_residual = max_object_residual;
  state.diag.contact_count = static_cast<int>(state.contacts.size());
  state.diag.max_clutch_torque = 0.0;
  for (const ClutchState& c : state.clutches)
    state.diag.max_clutch_torque = std::max(state.diag.max_clutch_torque,
                                            std::abs(c.transmitted_torque));
  state.diag.max_motor_torque = std::max(std::abs(state.motors[0].delivered_torque),
                                         std::abs(state.motors[1].delivered_torque));
  state.t += dt;
  return SimStatus::ok;
}

SimResult simulate(const Scene& scene, StopRule stop) {
  SimResult result;
  SimState state = init_state(scene);
  result.trace.push_back(state);

  const double dt = scene.sim.dt;
  const long long steps = std::llround(std::ceil(scene.sim.t_end / dt - 1e-9));
  int streak = 0;
  bool settled = false;

  for (long long i = 1; i <= steps; ++i) {
    const SimStatus status = quasi_static_step(state, scene, dt);
    if (status == SimStatus::numerical_blowup) {
      result.status = status;
      result.message = "joint or object rate exceeded the configured bound at t = " +
                       std::to_string(state.t);
      break;
    }
    const double residual =
        std::max(state.diag.max_joint_residual, state.diag.max_object_residual);
    result.final_residual = residual;
    streak = residual < scene.sim.equilibrium_tol ? streak + 1 : 0;
    if (i % scene.sim.trace_every == 0) result.trace.push_back(state);
    if (stop == StopRule::at_equilibrium && streak >= kEquilibriumStreak) {
      settled = true;
      break;
    }
  }

  if (result.status != SimStatus::numerical_blowup) {
    if (stop == StopRule::at_equilibrium)
      result.status = settled ? SimStatus::equilibrium : SimStatus::equilibrium_not_reached;
    else
      result.status = SimStatus::reached_t_end;
    if (result.status == SimStatus::equilibrium_not_reached)
      result.message = "residual " + std::to_string(result.final_residual) + " N*m after t = " +
                       std::to_string(state.t);
  }
  if (result.trace.empty() || result.trace.back().t != state.t) result.trace.push_back(state);
  result.final_state = std::move(state);
  return result;
}

GraspReport grasp_quality(const SimState& state, const Scene& scene, int object, double tol) {
  GraspReport report;
  if (object < 0 || object >= static_cast<int>(scene.objects.size())) return report;
  const ObjectSpec& spec = scene.objects[static_cast<size_t>(object)];
  const ObjectState& obj = state.objects[static_cast<size_t>(object)];

  Vec2 force = spec.mass * scene.gravity;
  double torque_nm = 0.0;
  std::vector<const ContactPoint*> on_object;
  for (const ContactPoint& c : state.contacts) {
    if (c.object != object) continue;
    on_object.push_back(&c);
    const Vec2 f = -(c.normal_force * c.normal + c.tangent_force * perp(c.normal));
    force += f;
    torque_nm += cross(c.position - obj.position, f) * 1e-3 - c.spin_moment;
  }
  report.force_residual = force.norm();
  report.torque_residual = std::abs(torque_nm);
  report.contact_count = static_cast<int>(on_object.size());

  report.min_cone_margin = on_object.empty() ? 0.0 : 1.0;
  bool cones_ok = true;
  for (const ContactPoint* c : on_object) {
    const double limit = c->mu * c->normal_force;
    const double margin = limit > 1e-12 ? (limit - std::abs(c->tangent_force)) / limit : 0.0;
    report.min_cone_margin = std::min(report.min_cone_margin, margin);
    if (std::abs(c->tangent_force) > limit + 1e-9) cones_ok = false;
  }

  for (size_t i = 0; i < on_object.size() && !report.opposing_contacts; ++i)
    for (size_t j = i + 1; j < on_object.size(); ++j)
      if (dot(on_object[i]->normal, on_object[j]->normal) < -0.2) {
        report.opposing_contacts = true;
        break;
      }

  const double residual_eq = report.torque_residual + report.force_residual * kCharLength;
  report.stable = residual_eq < tol && cones_ok && report.contact_count >= 2 &&
                  report.opposing_contacts;
  return report;
}

}  // namespace softhand

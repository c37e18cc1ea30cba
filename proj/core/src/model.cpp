#include "softhand/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "softhand/kinematics.hpp"

namespace softhand {

namespace {

constexpr double kPi = 3.14159265358979323846;

Vec2 mirror_y(const Vec2& v) { return {v.x, -v.y}; }

Phalanx make_phalanx(const HandConfig& cfg, int index, bool mirrored) {
  Phalanx p;
  p.length = cfg.phalanx_lengths[static_cast<size_t>(index)];
  p.is_terminal = (index == 3);
  if (p.is_terminal) {
    p.guides_flexor = {cfg.distal_flexor_guide};
    p.guides_extensor = {cfg.distal_extensor_guide};
    p.anchor_flexor = cfg.anchor_flexor;
    p.anchor_extensor = cfg.anchor_extensor;
    p.pad_friction = cfg.pad_friction;
  } else {
    p.guides_flexor.assign(cfg.flexor_guides.begin(), cfg.flexor_guides.end());
    p.guides_extensor.assign(cfg.extensor_guides.begin(), cfg.extensor_guides.end());
    p.pad_friction = cfg.beam_friction;
  }
  if (mirrored) {
    for (auto& g : p.guides_flexor) g = mirror_y(g);
    for (auto& g : p.guides_extensor) g = mirror_y(g);
    p.anchor_flexor = mirror_y(p.anchor_flexor);
    p.anchor_extensor = mirror_y(p.anchor_extensor);
  }
  return p;
}

Finger make_finger(const HandConfig& cfg, const std::string& name, Vec2 base, double angle,
                   PalmSide side) {
  Finger f;
  f.name = name;
  const bool mirrored = (side == PalmSide::pos_y);
  for (int i = 0; i < 4; ++i) f.phalanges[static_cast<size_t>(i)] = make_phalanx(cfg, i, mirrored);
  f.joint_min = {0.0, 0.0, 0.0};
  f.joint_max = {cfg.joint_limit, cfg.joint_limit, cfg.joint_limit};
  f.base_pos = base;
  f.base_angle = angle;
  f.palm_side = side;
  return f;
}

// Palm entry guides run in a straight column aligned with the finger-local
// guide line of the given side, so the tendon enters the base phalanx with no
// bend at rest.
std::vector<RoutePoint> make_route_points(const Finger& finger, TendonSide side) {
  std::vector<RoutePoint> pts;
  const Phalanx& base = finger.phalanges[0];
  const auto& base_guides =
      side == TendonSide::flexor ? base.guides_flexor : base.guides_extensor;
  const double lateral = base_guides.front().y;
  for (double entry_x : {-60.0, -35.0, -10.0}) {
    // Palm-frame point expressed through the (static) base phalanx frame so the
    // column follows the finger's mounting pose.
    pts.push_back(RoutePoint{-1, Vec2{entry_x, lateral}});
  }
  for (int body = 0; body < 4; ++body) {
    const Phalanx& ph = finger.phalanges[static_cast<size_t>(body)];
    const auto& guides = side == TendonSide::flexor ? ph.guides_flexor : ph.guides_extensor;
    for (const Vec2& g : guides) pts.push_back(RoutePoint{body, g});
  }
  const Phalanx& distal = finger.phalanges[3];
  pts.push_back(RoutePoint{
      3, side == TendonSide::flexor ? distal.anchor_flexor : distal.anchor_extensor});
  return pts;
}

// The palm points above are authored in the base phalanx frame; bake them to
// palm-frame coordinates with the finger's mounting transform.
void bake_palm_points(std::vector<RoutePoint>& pts, const Finger& finger) {
  const Transform2 mount{Rot2::from_angle(finger.base_angle), finger.base_pos};
  for (auto& p : pts) {
    if (p.body == -1) p.local = mount.apply(p.local);
  }
}

void add_finger_routes(HandModel& model, const HandConfig& cfg, int finger_index) {
  const Finger& finger = model.fingers[static_cast<size_t>(finger_index)];
  for (TendonSide side : {TendonSide::flexor, TendonSide::extensor}) {
    TendonRoute route;
    route.finger = finger_index;
    route.side = side;
    route.spool = static_cast<int>(model.routes.size());
    route.points = make_route_points(finger, side);
    bake_palm_points(route.points, finger);
    model.routes.push_back(std::move(route));

    SpoolSpec spool;
    spool.radius = cfg.spool_radius;
    spool.clutch = static_cast<int>(model.drive.clutches.size());
    spool.shaft = side == TendonSide::flexor ? 0 : 1;
    model.drive.spools.push_back(spool);
    model.drive.clutches.push_back(ClutchSpec{cfg.clutch_slip_torque});
  }
}

void finalize_rest_lengths(HandModel& model) {
  std::vector<std::array<double, 3>> q(model.fingers.size(), {0.0, 0.0, 0.0});
  const HandPose pose = pose_hand(model, q);
  for (auto& route : model.routes) {
    route.rest_length = tendon_path_length(model, route, pose);
  }
}

void apply_scalar_config(HandModel& model, const HandConfig& cfg) {
  model.tendon_stiffness = cfg.tendon_stiffness;
  model.guide_friction_mu = cfg.guide_friction_mu;
  model.joint_damping = cfg.joint_damping;
  for (auto& m : model.drive.motors) {
    m.max_torque = cfg.motor_max_torque;
    m.no_load_speed = cfg.motor_no_load_speed;
  }
}

}  // namespace

HandModel build_default_hand(const HandConfig& cfg) {
  HandModel model;

  // Long fingers rise from the palm line with the flexor side facing the
  // thumb; the thumb opposes across the configured aperture. Both sides lean
  // outward so the open hand forms a V that cradles objects wider than the
  // base aperture, standing in for the thumb's out-of-plane opposition angle.
  // The joint limit default (0.8 rad) keeps every flexor crossing segment on
  // the flexing side of its joint over the whole range; past ~0.93 rad the
  // joint-adjacent guides of this layout meet and the moment arm would
  // change sign.
  const double finger_lean = kPi / 2.0 - 10.0 * kPi / 180.0;
  const double thumb_lean = kPi / 2.0 + 25.0 * kPi / 180.0;
  const double index_x = 46.0;
  const double thumb_x = index_x - cfg.aperture;
  model.fingers.push_back(
      make_finger(cfg, "thumb", {thumb_x, 0.0}, thumb_lean, PalmSide::neg_y));
  model.fingers.push_back(
      make_finger(cfg, "index", {index_x, 0.0}, finger_lean, PalmSide::pos_y));
  model.fingers.push_back(
      make_finger(cfg, "middle", {index_x + 12.0, 0.0}, finger_lean, PalmSide::pos_y));
  model.fingers.push_back(
      make_finger(cfg, "pinkie", {index_x + 24.0, 0.0}, finger_lean, PalmSide::pos_y));

  for (int i = 0; i < 4; ++i) add_finger_routes(model, cfg, i);

  model.palm = Capsule{{thumb_x - 16.0, -15.0}, {index_x + 39.0, -15.0}, 15.0};
  apply_scalar_config(model, cfg);
  finalize_rest_lengths(model);
  return model;
}

HandModel build_single_finger_rig(const HandConfig& cfg, bool palm_up) {
  HandModel model;
  model.fingers.push_back(make_finger(cfg, "finger", {0.0, 0.0}, 0.0,
                                      palm_up ? PalmSide::pos_y : PalmSide::neg_y));
  add_finger_routes(model, cfg, 0);
  // The bench table doubles as the palm contact capsule; by default it is
  // parked far from the workspace.
  model.palm = Capsule{cfg.rig_table_a, cfg.rig_table_b, 15.0};
  apply_scalar_config(model, cfg);
  finalize_rest_lengths(model);
  return model;
}

namespace {

void check_finger(const HandModel& model, int fi, ValidationReport& report) {
  const Finger& f = model.fingers[static_cast<size_t>(fi)];
  const std::string prefix = "fingers[" + std::to_string(fi) + "].";
  double total = 0.0;
  for (int pi = 0; pi < 4; ++pi) {
    const Phalanx& p = f.phalanges[static_cast<size_t>(pi)];
    const std::string pp = prefix + "phalanges[" + std::to_string(pi) + "].";
    if (!(p.length > 0.0))
      report.violations.push_back({pp + "length", "phalanx length must be > 0"});
    total += p.length;
    for (const auto* guides : {&p.guides_flexor, &p.guides_extensor}) {
      for (const Vec2& g : *guides) {
        if (g.x < 0.0 || g.x > p.length)
          report.violations.push_back(
              {pp + "guides", "guide x-coordinate outside [0, length]"});
      }
    }
    if (p.is_terminal != (pi == 3))
      report.violations.push_back({pp + "is_terminal", "only the distal phalanx is terminal"});
    if (pi == 3) {
      if (p.guides_flexor.empty() || p.guides_extensor.empty())
        report.violations.push_back({pp + "guides", "terminal phalanx needs a guide pair"});
    } else if (pi != 0) {
      if (p.guides_flexor.size() < 3 || p.guides_extensor.size() < 3)
        report.violations.push_back(
            {pp + "guides", "medial phalanx needs >= 3 guides per side"});
    }
    if (!(p.pad_friction > 0.0))
      report.violations.push_back({pp + "pad_friction", "pad friction must be > 0"});
  }
  if (std::abs(total - 145.0) > 1e-9)
    report.violations.push_back(
        {prefix + "phalanges", "total phalanx length != 145 mm"});
  for (int j = 0; j < 3; ++j) {
    if (f.joint_min[static_cast<size_t>(j)] != 0.0)
      report.violations.push_back(
          {prefix + "joint_min", "extension stop must sit at exactly 0"});
    if (!(f.joint_max[static_cast<size_t>(j)] > 0.0))
      report.violations.push_back({prefix + "joint_max", "flexion limit must be > 0"});
  }
}

void check_route(const HandModel& model, int ri, ValidationReport& report) {
  const TendonRoute& r = model.routes[static_cast<size_t>(ri)];
  const std::string prefix = "routes[" + std::to_string(ri) + "].";
  if (r.finger < 0 || r.finger >= static_cast<int>(model.fingers.size())) {
    report.violations.push_back({prefix + "finger", "route references a missing finger"});
    return;
  }
  if (!(r.rest_length > 0.0))
    report.violations.push_back({prefix + "rest_length", "rest length must be > 0"});
  int prev_body = -1;
  for (const RoutePoint& p : r.points) {
    if (p.body < prev_body)
      report.violations.push_back(
          {prefix + "points", "route must visit phalanges in proximal-to-distal order"});
    prev_body = std::max(prev_body, p.body);
    if (p.body > 3) report.violations.push_back({prefix + "points", "body index out of range"});
  }
  if (r.points.empty() || r.points.back().body != 3) {
    report.violations.push_back({prefix + "points", "route must terminate on the distal phalanx"});
    return;
  }
  const Finger& f = model.fingers[static_cast<size_t>(r.finger)];
  const Vec2 anchor = r.side == TendonSide::flexor ? f.phalanges[3].anchor_flexor
                                                   : f.phalanges[3].anchor_extensor;
  if (distance(r.points.back().local, anchor) > 1e-9)
    report.violations.push_back({prefix + "points", "route must terminate at the terminal anchor"});
  if (r.spool < 0 || r.spool >= static_cast<int>(model.drive.spools.size()))
    report.violations.push_back({prefix + "spool", "route references a missing spool"});
}

void check_moment_arm_signs(const HandModel& model, ValidationReport& report) {
  for (size_t ri = 0; ri < model.routes.size(); ++ri) {
    const TendonRoute& r = model.routes[ri];
    if (r.finger < 0 || r.finger >= static_cast<int>(model.fingers.size())) continue;
    if (r.points.empty() || r.points.back().body != 3) continue;
    const auto arms = moment_arms(model, r, {0.0, 0.0, 0.0});
    for (int j = 0; j < 3; ++j) {
      const double arm = arms[static_cast<size_t>(j)];
      const bool ok = r.side == TendonSide::flexor ? arm > 0.0 : arm < 0.0;
      if (!ok) {
        report.violations.push_back(
            {"routes[" + std::to_string(ri) + "].moment_arm",
             std::string("moment-arm sign at joint ") + std::to_string(j) + ": " +
                 (r.side == TendonSide::flexor ? "flexor must flex" : "extensor must extend")});
      }
    }
  }
}

int count_guides(const HandModel& model) {
  int n = 0;
  for (const Finger& f : model.fingers)
    for (const Phalanx& p : f.phalanges)
      n += static_cast<int>(p.guides_flexor.size() + p.guides_extensor.size());
  for (const TendonRoute& r : model.routes)
    for (const RoutePoint& p : r.points)
      if (p.body == -1) ++n;
  return n;
}

}  // namespace

ValidationReport validate(const HandModel& model) {
  ValidationReport report;

  if (model.fingers.size() != 4)
    report.violations.push_back({"fingers", "hand must have exactly 4 fingers"});
  for (size_t fi = 0; fi < model.fingers.size(); ++fi)
    check_finger(model, static_cast<int>(fi), report);

  if (model.routes.size() != 2 * model.fingers.size())
    report.violations.push_back({"routes", "two tendon routes per finger required"});
  if (model.fingers.size() == 4 && model.routes.size() != 8)
    report.violations.push_back({"routes", "hand must have exactly 8 tendon routes"});
  for (size_t ri = 0; ri < model.routes.size(); ++ri)
    check_route(model, static_cast<int>(ri), report);

  std::set<int> spools_used;
  for (const TendonRoute& r : model.routes) {
    if (!spools_used.insert(r.spool).second)
      report.violations.push_back({"routes.spool", "every route needs a unique spool"});
  }

  if (model.drive.spools.size() != model.routes.size())
    report.violations.push_back({"drive.spools", "one spool per tendon route required"});
  if (model.drive.clutches.size() != model.drive.spools.size())
    report.violations.push_back({"drive.clutches", "one clutch per spool required"});
  int per_shaft[2] = {0, 0};
  for (size_t si = 0; si < model.drive.spools.size(); ++si) {
    const SpoolSpec& s = model.drive.spools[si];
    if (!(s.radius > 0.0))
      report.violations.push_back(
          {"drive.spools[" + std::to_string(si) + "].radius", "spool radius must be > 0"});
    if (s.shaft == 0 || s.shaft == 1) ++per_shaft[s.shaft];
    else
      report.violations.push_back(
          {"drive.spools[" + std::to_string(si) + "].shaft", "shaft index out of range"});
  }
  if (model.fingers.size() == 4 && (per_shaft[0] != 4 || per_shaft[1] != 4))
    report.violations.push_back({"drive.spools", "each shaft must carry exactly 4 spools"});
  for (size_t ci = 0; ci < model.drive.clutches.size(); ++ci) {
    if (!(model.drive.clutches[ci].slip_torque > 0.0))
      report.violations.push_back(
          {"drive.clutches[" + std::to_string(ci) + "].slip_torque", "slip torque must be > 0"});
  }
  for (size_t mi = 0; mi < model.drive.motors.size(); ++mi) {
    if (!(model.drive.motors[mi].max_torque > 0.0))
      report.violations.push_back(
          {"drive.motors[" + std::to_string(mi) + "].max_torque", "motor torque cap must be > 0"});
  }

  if (model.fingers.size() == 4 && count_guides(model) < 100)
    report.violations.push_back({"guides", "default hand must carry >= 100 guide points"});

  if (!(model.tendon_stiffness > 0.0))
    report.violations.push_back({"tendon_stiffness", "tendon stiffness must be > 0"});
  if (model.guide_friction_mu < 0.0)
    report.violations.push_back({"guide_friction_mu", "guide friction must be >= 0"});
  if (!(model.joint_damping > 0.0))
    report.violations.push_back({"joint_damping", "joint damping must be > 0"});
  if (!(model.palm_friction > 0.0))
    report.violations.push_back({"palm_friction", "palm friction must be > 0"});
  if (!(model.phalanx_half_width > 0.0))
    report.violations.push_back({"phalanx_half_width", "phalanx half width must be > 0"});

  check_moment_arm_signs(model, report);
  return report;
}

}  // namespace softhand

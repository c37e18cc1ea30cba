#include "softhand/render.hpp"

#include "softhand/io_util.hpp"
#include "softhand/kinematics.hpp"

namespace softhand {

namespace {

// World y-up to SVG y-down.
std::string pt(const Vec2& p) { return fmt_f3(p.x) + "," + fmt_f3(-p.y); }

std::string capsule_path(const Vec2& a, const Vec2& b, double r) {
  Vec2 axis = b - a;
  const double len = axis.norm();
  Vec2 u = len > 1e-12 ? axis * (1.0 / len) : Vec2{1.0, 0.0};
  const Vec2 n = perp(u);
  const Vec2 p1 = a + n * r;
  const Vec2 p2 = b + n * r;
  const Vec2 p3 = b - n * r;
  const Vec2 p4 = a - n * r;
  const std::string rr = fmt_f3(r);
  // Sweep flags account for the y flip.
  return "M " + pt(p1) + " L " + pt(p2) + " A " + rr + " " + rr + " 0 0 0 " + pt(p3) + " L " +
         pt(p4) + " A " + rr + " " + rr + " 0 0 0 " + pt(p1) + " Z";
}

void render_object(std::string& out, const ObjectSpec& spec, const ObjectState& obj,
                   const RenderStyle& style) {
  const Transform2 t{Rot2::from_angle(obj.angle), obj.position};
  out += "  <g class=\"object\" fill=\"" + style.object_color +
         "\" fill-opacity=\"0.55\" stroke=\"#6b5612\" stroke-width=\"1\">\n";
  if (const auto* c = std::get_if<CircleShape>(&spec.shape)) {
    out += "    <circle cx=\"" + fmt_f3(obj.position.x) + "\" cy=\"" + fmt_f3(-obj.position.y) +
           "\" r=\"" + fmt_f3(c->radius) + "\"/>\n";
  } else if (const auto* cap = std::get_if<CapsuleShape>(&spec.shape)) {
    out += "    <path d=\"" + capsule_path(t.apply(cap->a), t.apply(cap->b), cap->radius) +
           "\"/>\n";
  } else {
    const auto& poly = std::get<PolygonShape>(spec.shape);
    out += "    <polygon points=\"";
    for (size_t i = 0; i < poly.vertices.size(); ++i) {
      if (i) out += " ";
      out += pt(t.apply(poly.vertices[i]));
    }
    out += "\"/>\n";
  }
  out += "  </g>\n";
}

}  // namespace

std::string render_frame(const SimState& state, const Scene& scene, const RenderStyle& style) {
  const HandModel& model = scene.hand;
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"" + fmt_f3(style.min_x) + " " +
         fmt_f3(-(style.min_y + style.height)) + " " + fmt_f3(style.width) + " " +
         fmt_f3(style.height) + "\">\n";
  out += "  <!-- t = " + fmt_num(state.t) + " s -->\n";

  out += "  <path class=\"palm\" d=\"" +
         capsule_path(model.palm.a, model.palm.b, model.palm.radius) +
         "\" fill=\"#d7dadd\" stroke=\"#7a7f85\" stroke-width=\"1\"/>\n";

  for (size_t fi = 0; fi < model.fingers.size(); ++fi) {
    const Finger& finger = model.fingers[fi];
    const FingerPose& fp = state.pose.fingers[fi];
    for (int pi = 0; pi < 4; ++pi) {
      const Phalanx& ph = finger.phalanges[static_cast<size_t>(pi)];
      const Transform2& t = fp.to_world[static_cast<size_t>(pi)];
      out += "  <path class=\"phalanx\" d=\"" +
             capsule_path(t.apply({0.0, 0.0}), t.apply({ph.length, 0.0}),
                          model.phalanx_half_width) +
             "\" fill=\"" + style.phalanx_color +
             "\" fill-opacity=\"0.45\" stroke=\"#5f6368\" stroke-width=\"1\"/>\n";
    }
  }

  for (size_t r = 0; r < model.routes.size(); ++r) {
    const TendonRoute& route = model.routes[r];
    const RouteGeometry geom = route_geometry(model, route, state.pose);
    const bool flexor = route.side == TendonSide::flexor;
    out += std::string("  <polyline class=\"tendon ") + (flexor ? "flexor" : "extensor") +
           "\" points=\"";
    for (size_t i = 0; i < geom.points.size(); ++i) {
      if (i) out += " ";
      out += pt(geom.points[i]);
    }
    out += "\" fill=\"none\" stroke=\"" +
           (flexor ? style.flexor_color : style.extensor_color) + "\" stroke-width=\"1.2\"/>\n";
  }

  for (const ContactPoint& c : state.contacts) {
    const Vec2 tip = c.position + (c.normal_force * c.normal + c.tangent_force * perp(c.normal)) *
                                      style.force_scale;
    out += "  <g class=\"contact\" stroke=\"" + style.contact_color + "\">\n";
    out += "    <circle cx=\"" + fmt_f3(c.position.x) + "\" cy=\"" + fmt_f3(-c.position.y) +
           "\" r=\"2\" fill=\"" + style.contact_color + "\"/>\n";
    out += "    <line x1=\"" + fmt_f3(c.position.x) + "\" y1=\"" + fmt_f3(-c.position.y) +
           "\" x2=\"" + fmt_f3(tip.x) + "\" y2=\"" + fmt_f3(-tip.y) +
           "\" stroke-width=\"1\"/>\n";
    out += "  </g>\n";
  }

  for (size_t oi = 0; oi < scene.objects.size(); ++oi)
    render_object(out, scene.objects[oi], state.objects[oi], style);

  out += "</svg>\n";
  return out;
}

}  // namespace softhand

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string_view>

#include "softhand/scene.hpp"

namespace softhand {

namespace {

enum class TokKind { ident, number, lbrace, rbrace, semi, end };

struct Token {
  TokKind kind = TokKind::end;
  std::string_view text;
  double number = 0.0;
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  Lexer(std::string_view src, std::vector<Diagnostic>& diags) : src_(src), diags_(diags) {}

  Token next() {
    skip_ws();
    Token t;
    t.line = line_;
    t.col = col_;
    if (pos_ >= src_.size()) return t;
    const char c = src_[pos_];
    if (c == '{') return punct(TokKind::lbrace);
    if (c == '}') return punct(TokKind::rbrace);
    if (c == ';') return punct(TokKind::semi);
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        advance();
      t.kind = TokKind::ident;
      t.text = src_.substr(start, pos_ - start);
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.') {
      const size_t start = pos_;
      while (pos_ < src_.size()) {
        const char d = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(d)) || d == '.' || d == 'e' || d == 'E' ||
            d == '-' || d == '+')
          advance();
        else
          break;
      }
      t.text = src_.substr(start, pos_ - start);
      double value = 0.0;
      auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
      if (res.ec != std::errc{} || res.ptr != t.text.data() + t.text.size()) {
        diags_.push_back({t.line, t.col, "malformed number '" + std::string(t.text) + "'"});
        t.kind = TokKind::number;
        t.number = 0.0;
        return t;
      }
      t.kind = TokKind::number;
      t.number = value;
      return t;
    }
    diags_.push_back({t.line, t.col, std::string("unexpected character '") + c + "'"});
    advance();
    return next();
  }

 private:
  Token punct(TokKind k) {
    Token t;
    t.kind = k;
    t.line = line_;
    t.col = col_;
    t.text = src_.substr(pos_, 1);
    advance();
    return t;
  }

  void skip_ws() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else {
        break;
      }
    }
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  std::string_view src_;
  std::vector<Diagnostic>& diags_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

struct Entry {
  Token key;
  std::vector<Token> values;
};

struct Section {
  Token kind;
  std::optional<Token> name;
  std::vector<Entry> entries;
};

class Parser {
 public:
  Parser(std::string_view src, std::vector<Diagnostic>& diags) : lex_(src, diags), diags_(diags) {
    cur_ = lex_.next();
  }

  std::vector<Section> parse_document() {
    std::vector<Section> sections;
    while (cur_.kind != TokKind::end) {
      if (cur_.kind != TokKind::ident) {
        error(cur_, "expected a section name");
        skip_to_ident();
        continue;
      }
      Section s;
      s.kind = cur_;
      bump();
      if (cur_.kind == TokKind::ident) {
        s.name = cur_;
        bump();
      }
      if (cur_.kind != TokKind::lbrace) {
        error(cur_, "expected '{' after section header");
        skip_to_ident();
        continue;
      }
      bump();
      while (cur_.kind != TokKind::rbrace && cur_.kind != TokKind::end) {
        if (cur_.kind != TokKind::ident) {
          error(cur_, "expected a key");
          skip_past_semi();
          continue;
        }
        Entry e;
        e.key = cur_;
        bump();
        while (cur_.kind == TokKind::number || cur_.kind == TokKind::ident) {
          e.values.push_back(cur_);
          bump();
        }
        if (cur_.kind != TokKind::semi) {
          error(cur_, "expected ';' after entry");
          skip_past_semi();
        } else {
          bump();
        }
        s.entries.push_back(std::move(e));
      }
      if (cur_.kind == TokKind::rbrace)
        bump();
      else
        error(cur_, "expected '}' to close section");
      sections.push_back(std::move(s));
    }
    return sections;
  }

 private:
  void bump() { cur_ = lex_.next(); }
  void error(const Token& t, const std::string& msg) { diags_.push_back({t.line, t.col, msg}); }
  void skip_past_semi() {
    while (cur_.kind != TokKind::semi && cur_.kind != TokKind::rbrace && cur_.kind != TokKind::end)
      bump();
    if (cur_.kind == TokKind::semi) bump();
  }
  void skip_to_ident() {
    while (cur_.kind != TokKind::end && cur_.kind != TokKind::ident) bump();
  }

  Lexer lex_;
  std::vector<Diagnostic>& diags_;
  Token cur_;
};

// --- semantic layer -------------------------------------------------------

class SceneBuilder {
 public:
  explicit SceneBuilder(std::vector<Diagnostic>& diags) : diags_(diags) {}

  Scene build(const std::vector<Section>& sections) {
    Scene scene;
    for (const Section& s : sections) apply_section(scene, s);

    std::stable_sort(scene.objects.begin(), scene.objects.end(),
                     [](const ObjectSpec& a, const ObjectSpec& b) { return a.name < b.name; });
    std::stable_sort(scene.loads.begin(), scene.loads.end(),
                     [](const PointLoad& a, const PointLoad& b) { return a.name < b.name; });
    std::stable_sort(scene.blocks.begin(), scene.blocks.end(),
                     [](const JointBlock& a, const JointBlock& b) { return a.finger < b.finger; });
    std::stable_sort(scene.control.begin(), scene.control.end(),
                     [](const MotorCommand& a, const MotorCommand& b) {
                       if (a.t != b.t) return a.t < b.t;
                       return static_cast<int>(a.motor) < static_cast<int>(b.motor);
                     });
    scene.hand = build_scene_hand(scene.hand_settings);
    return scene;
  }

 private:
  void error(const Token& t, const std::string& msg) { diags_.push_back({t.line, t.col, msg}); }

  bool want_numbers(const Entry& e, size_t n) {
    if (e.values.size() != n) {
      error(e.key, "key '" + std::string(e.key.text) + "' expects " + std::to_string(n) +
                       " numeric value(s)");
      return false;
    }
    for (const Token& v : e.values) {
      if (v.kind != TokKind::number) {
        error(v, "expected a number");
        return false;
      }
    }
    return true;
  }

  bool positive(const Entry& e, double v, const char* what) {
    if (v > 0.0) return true;
    error(e.key, std::string(what) + " must be > 0");
    return false;
  }

  void apply_section(Scene& scene, const Section& s) {
    const std::string_view kind = s.kind.text;
    if (kind == "sim") {
      require_unnamed(s);
      for (const Entry& e : s.entries) apply_sim(scene.sim, e);
    } else if (kind == "gravity") {
      require_unnamed(s);
      for (const Entry& e : s.entries) apply_gravity(scene.gravity, e);
    } else if (kind == "hand") {
      require_unnamed(s);
      for (const Entry& e : s.entries) apply_hand(scene.hand_settings, e);
    } else if (kind == "control") {
      require_unnamed(s);
      for (const Entry& e : s.entries) apply_control(scene.control, e);
    } else if (kind == "object") {
      if (!s.name) {
        error(s.kind, "object section needs a name");
        return;
      }
      ObjectSpec obj;
      obj.name = std::string(s.name->text);
      if (!object_names_.insert(obj.name).second) {
        error(*s.name, "duplicate object name '" + obj.name + "'");
        return;
      }
      bool has_shape = false;
      for (const Entry& e : s.entries) apply_object(obj, e, has_shape);
      if (!has_shape) error(s.kind, "object '" + obj.name + "' needs a shape");
      scene.objects.push_back(std::move(obj));
    } else if (kind == "load") {
      if (!s.name) {
        error(s.kind, "load section needs a name");
        return;
      }
      PointLoad load;
      load.name = std::string(s.name->text);
      if (!load_names_.insert(load.name).second) {
        error(*s.name, "duplicate load name '" + load.name + "'");
        return;
      }
      for (const Entry& e : s.entries) apply_load(load, e);
      scene.loads.push_back(std::move(load));
    } else if (kind == "block") {
      if (!s.name) {
        error(s.kind, "block section needs a name");
        return;
      }
      JointBlock block;
      for (const Entry& e : s.entries) apply_block(block, e);
      scene.blocks.push_back(block);
    } else {
      error(s.kind, "unknown section '" + std::string(kind) + "'");
    }
  }

  void require_unnamed(const Section& s) {
    if (s.name) error(*s.name, "section '" + std::string(s.kind.text) + "' takes no name");
  }

  void apply_sim(SimParams& sim, const Entry& e) {
    const std::string_view k = e.key.text;
    if (k == "dt") {
      if (want_numbers(e, 1) && positive(e, e.values[0].number, "dt")) sim.dt = e.values[0].number;
    } else if (k == "t_end") {
      if (want_numbers(e, 1)) {
        if (e.values[0].number < 0.0)
          error(e.key, "t_end must be >= 0");
        else
          sim.t_end = e.values[0].number;
      }
    } else if (k == "equilibrium_tol") {
      if (want_numbers(e, 1) && positive(e, e.values[0].number, "equilibrium_tol"))
        sim.equilibrium_tol = e.values[0].number;
    } else if (k == "trace_every") {
      if (want_numbers(e, 1)) {
        const double v = e.values[0].number;
        if (v < 1.0 || v != std::floor(v))
          error(e.key, "trace_every must be a positive integer");
        else
          sim.trace_every = static_cast<int>(v);
      }
    } else if (k == "contact_stiffness") {
      if (want_numbers(e, 1) && positive(e, e.values[0].number, "contact_stiffness"))
        sim.contact_stiffness = e.values[0].number;
    } else if (k == "stop_stiffness") {
      if (want_numbers(e, 1) && positive(e, e.values[0].number, "stop_stiffness"))
        sim.stop_stiffness = e.values[0].number;
    } else if (k == "qdot_limit") {
      if (want_numbers(e, 1) && positive(e, e.values[0].number, "qdot_limit"))
        sim.qdot_limit = e.values[0].number;
    } else {
      error(e.key, "unknown sim key '" + std::string(k) + "'");
    }
  }

  void apply_gravity(Vec2& g, const Entry& e) {
    const std::string_view k = e.key.text;
    if (k == "x") {
      if (want_numbers(e, 1)) g.x = e.values[0].number;
    } else if (k == "y") {
      if (want_numbers(e, 1)) g.y = e.values[0].number;
    } else {
      error(e.key, "unknown gravity key '" + std::string(k) + "'");
    }
  }

  void apply_hand(HandSettings& h, const Entry& e) {
    const std::string_view k = e.key.text;
    auto scalar = [&](double& field, const char* what, bool strict) {
      if (!want_numbers(e, 1)) return;
      const double v = e.values[0].number;
      if (strict ? v > 0.0 : v >= 0.0)
        field = v;
      else
        error(e.key, std::string(what) + (strict ? " must be > 0" : " must be >= 0"));
    };
    if (k == "fingers") {
      if (want_numbers(e, 1)) {
        const double v = e.values[0].number;
        if (v == 1.0 || v == 4.0)
          h.fingers = static_cast<int>(v);
        else
          error(e.key, "fingers must be 1 (bench rig) or 4 (whole hand)");
      }
    } else if (k == "rig_palm_up") {
      if (e.values.size() == 1 && e.values[0].kind == TokKind::ident &&
          (e.values[0].text == "true" || e.values[0].text == "false")) {
        h.rig_palm_up = e.values[0].text == "true";
      } else {
        error(e.key, "rig_palm_up expects true or false");
      }
    } else if (k == "rig_table") {
      if (want_numbers(e, 4)) {
        h.rig_table_a = {e.values[0].number, e.values[1].number};
        h.rig_table_b = {e.values[2].number, e.values[3].number};
      }
    } else if (k == "initial_q") {
      if (want_numbers(e, 1)) {
        if (e.values[0].number < 0.0)
          error(e.key, "initial_q must be >= 0");
        else
          h.initial_q = e.values[0].number;
      }
    } else if (k == "guide_friction_mu") {
      scalar(h.guide_friction_mu, "guide_friction_mu", false);
    } else if (k == "tendon_stiffness") {
      scalar(h.tendon_stiffness, "tendon_stiffness", true);
    } else if (k == "joint_damping") {
      scalar(h.joint_damping, "joint_damping", true);
    } else if (k == "spool_radius") {
      scalar(h.spool_radius, "spool_radius", true);
    } else if (k == "clutch_slip_torque") {
      scalar(h.clutch_slip_torque, "clutch_slip_torque", false);
    } else if (k == "motor_max_torque") {
      scalar(h.motor_max_torque, "motor_max_torque", true);
    } else if (k == "motor_no_load_speed") {
      scalar(h.motor_no_load_speed, "motor_no_load_speed", true);
    } else if (k == "joint_limit") {
      scalar(h.joint_limit, "joint_limit", true);
    } else if (k == "pad_friction") {
      scalar(h.pad_friction, "pad_friction", true);
    } else if (k == "beam_friction") {
      scalar(h.beam_friction, "beam_friction", true);
    } else if (k == "aperture") {
      scalar(h.aperture, "aperture", true);
    } else {
      error(e.key, "unknown hand key '" + std::string(k) + "'");
    }
  }

  void apply_control(std::vector<MotorCommand>& control, const Entry& e) {
    if (e.key.text != "at") {
      error(e.key, "control entries start with 'at'");
      return;
    }
    //   at <t> <agonist|antagonist> speed <rad/s>;
    //   at <t> <agonist|antagonist> hold;
    if (e.values.size() < 3 || e.values[0].kind != TokKind::number ||
        e.values[1].kind != TokKind::ident || e.values[2].kind != TokKind::ident) {
      error(e.key, "expected: at <t> <agonist|antagonist> <speed V | hold>");
      return;
    }
    MotorCommand cmd;
    cmd.t = e.values[0].number;
    if (cmd.t < 0.0) {
      error(e.values[0], "command time must be >= 0");
      return;
    }
    if (e.values[1].text == "agonist")
      cmd.motor = MotorId::agonist;
    else if (e.values[1].text == "antagonist")
      cmd.motor = MotorId::antagonist;
    else {
      error(e.values[1], "motor must be agonist or antagonist");
      return;
    }
    if (e.values[2].text == "hold") {
      if (e.values.size() != 3) {
        error(e.values[2], "hold takes no value");
        return;
      }
      cmd.hold = true;
    } else if (e.values[2].text == "speed") {
      if (e.values.size() != 4 || e.values[3].kind != TokKind::number) {
        error(e.values[2], "speed expects one numeric value");
        return;
      }
      cmd.speed = e.values[3].number;
    } else {
      error(e.values[2], "expected 'speed' or 'hold'");
      return;
    }
    control.push_back(cmd);
  }

  void apply_object(ObjectSpec& obj, const Entry& e, bool& has_shape) {
    const std::string_view k = e.key.text;
    if (k == "circle") {
      if (want_numbers(e, 1) && positive(e, e.values[0].number, "circle radius")) {
        obj.shape = CircleShape{e.values[0].number};
        has_shape = true;
      }
    } else if (k == "capsule") {
      if (want_numbers(e, 5) && positive(e, e.values[4].number, "capsule radius")) {
        obj.shape = CapsuleShape{{e.values[0].number, e.values[1].number},
                                 {e.values[2].number, e.values[3].number},
                                 e.values[4].number};
        has_shape = true;
      }
    } else if (k == "polygon") {
      if (e.values.size() < 6 || e.values.size() % 2 != 0) {
        error(e.key, "polygon expects >= 3 x y vertex pairs");
        return;
      }
      PolygonShape poly;
      for (size_t i = 0; i < e.values.size(); i += 2) {
        if (e.values[i].kind != TokKind::number || e.values[i + 1].kind != TokKind::number) {
          error(e.values[i], "polygon coordinates must be numbers");
          return;
        }
        poly.vertices.push_back({e.values[i].number, e.values[i + 1].number});
      }
      const size_t n = poly.vertices.size();
      for (size_t i = 0; i < n; ++i) {
        const Vec2& a = poly.vertices[i];
        const Vec2& b = poly.vertices[(i + 1) % n];
        const Vec2& c = poly.vertices[(i + 2) % n];
        if (cross(b - a, c - b) <= 0.0) {
          error(e.key, "polygon must be convex and counter-clockwise");
          return;
        }
      }
      obj.shape = std::move(poly);
      has_shape = true;
    } else if (k == "mass") {
      if (want_numbers(e, 1) && positive(e, e.values[0].number, "mass"))
        obj.mass = e.values[0].number;
    } else if (k == "pose") {
      if (want_numbers(e, 3)) {
        obj.position = {e.values[0].number, e.values[1].number};
        obj.angle = e.values[2].number;
      }
    } else if (k == "mobile") {
      if (!e.values.empty()) error(e.key, "mobile takes no value");
      obj.mobile = true;
    } else if (k == "fixed") {
      if (!e.values.empty()) error(e.key, "fixed takes no value");
      obj.mobile = false;
    } else if (k == "friction") {
      if (want_numbers(e, 1) && positive(e, e.values[0].number, "friction"))
        obj.friction = e.values[0].number;
    } else {
      error(e.key, "unknown object key '" + std::string(k) + "'");
    }
  }

  void apply_load(PointLoad& load, const Entry& e) {
    const std::string_view k = e.key.text;
    if (k == "finger") {
      if (want_numbers(e, 1)) load.finger = static_cast<int>(e.values[0].number);
    } else if (k == "phalanx") {
      if (want_numbers(e, 1)) {
        const double v = e.values[0].number;
        if (v < 0.0 || v > 3.0 || v != std::floor(v))
          error(e.key, "phalanx must be an integer in [0, 3]");
        else
          load.phalanx = static_cast<int>(v);
      }
    } else if (k == "at") {
      if (want_numbers(e, 2)) load.local = {e.values[0].number, e.values[1].number};
    } else if (k == "force") {
      if (want_numbers(e, 2)) load.force = {e.values[0].number, e.values[1].number};
    } else {
      error(e.key, "unknown load key '" + std::string(k) + "'");
    }
  }

  void apply_block(JointBlock& block, const Entry& e) {
    const std::string_view k = e.key.text;
    if (k == "finger") {
      if (want_numbers(e, 1)) block.finger = static_cast<int>(e.values[0].number);
    } else if (k == "fraction") {
      if (want_numbers(e, 3)) {
        for (int i = 0; i < 3; ++i) {
          const double v = e.values[static_cast<size_t>(i)].number;
          if (v < 0.0 || v > 1.0) {
            error(e.key, "block fractions must be in [0, 1]");
            return;
          }
          block.fraction[static_cast<size_t>(i)] = v;
        }
      }
    } else {
      error(e.key, "unknown block key '" + std::string(k) + "'");
    }
  }

  std::vector<Diagnostic>& diags_;
  std::set<std::string> object_names_;
  std::set<std::string> load_names_;
};

}  // namespace

ParseResult parse_scene(const std::string& text) {
  ParseResult result;
  Parser parser(text, result.diagnostics);
  const auto sections = parser.parse_document();
  SceneBuilder builder(result.diagnostics);
  result.scene = builder.build(sections);

  // Cross-section checks that need the final hand.
  const int nfingers = result.scene.hand_settings.fingers;
  for (const PointLoad& l : result.scene.loads) {
    if (l.finger < 0 || l.finger >= nfingers)
      result.diagnostics.push_back({1, 1, "load '" + l.name + "' references finger " +
                                              std::to_string(l.finger) + " of a " +
                                              std::to_string(nfingers) + "-finger hand"});
  }
  for (const JointBlock& b : result.scene.blocks) {
    if (b.finger < 0 || b.finger >= nfingers)
      result.diagnostics.push_back({1, 1, "block references finger " + std::to_string(b.finger) +
                                              " of a " + std::to_string(nfingers) +
                                              "-finger hand"});
  }
  return result;
}

}  // namespace softhand

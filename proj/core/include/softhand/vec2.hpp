#pragma once

#include <cmath>

namespace softhand {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator-() const { return {-x, -y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  Vec2& operator-=(const Vec2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }

  double norm() const { return std::hypot(x, y); }
  double norm_sq() const { return x * x + y * y; }
  Vec2 normalized() const {
    const double n = norm();
    return n > 0.0 ? Vec2{x / n, y / n} : Vec2{0.0, 0.0};
  }
};

inline Vec2 operator*(double s, const Vec2& v) { return {v.x * s, v.y * s}; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
// z-component of the 3-D cross product of planar vectors.
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
// Counter-clockwise quarter turn.
inline Vec2 perp(const Vec2& v) { return {-v.y, v.x}; }
inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

struct Rot2 {
  double c = 1.0;
  double s = 0.0;

  static Rot2 from_angle(double rad) { return {std::cos(rad), std::sin(rad)}; }
  Vec2 apply(const Vec2& v) const { return {c * v.x - s * v.y, s * v.x + c * v.y}; }
  Rot2 compose(const Rot2& o) const { return {c * o.c - s * o.s, s * o.c + c * o.s}; }
  double angle() const { return std::atan2(s, c); }
};

// Rigid planar transform: p_world = rot * p_local + trans.
struct Transform2 {
  Rot2 rot;
  Vec2 trans;

  Vec2 apply(const Vec2& p) const { return rot.apply(p) + trans; }
  Transform2 compose(const Transform2& o) const {
    return {rot.compose(o.rot), rot.apply(o.trans) + trans};
  }
};

// Closest point on segment [a,b] to p; t_out in [0,1] is the segment parameter.
inline Vec2 closest_point_on_segment(const Vec2& p, const Vec2& a, const Vec2& b,
                                     double* t_out = nullptr) {
  const Vec2 ab = b - a;
  const double len_sq = ab.norm_sq();
  double t = 0.0;
  if (len_sq > 0.0) {
    t = dot(p - a, ab) / len_sq;
    t = t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
  }
  if (t_out) *t_out = t;
  return a + ab * t;
}

// Closest point pair between segments [a1,b1] and [a2,b2].
// Deterministic tie-breaking: candidates are evaluated in a fixed order and a
// strictly-better distance is required to replace the current best.
inline void closest_points_segment_segment(const Vec2& a1, const Vec2& b1, const Vec2& a2,
                                           const Vec2& b2, Vec2& p1, Vec2& p2) {
  const Vec2 d1 = b1 - a1;
  const Vec2 d2 = b2 - a2;
  const Vec2 r = a1 - a2;
  const double A = d1.norm_sq();
  const double E = d2.norm_sq();
  const double F = dot(d2, r);

  double s = 0.0, t = 0.0;
  if (A <= 1e-18 && E <= 1e-18) {
    p1 = a1;
    p2 = a2;
    return;
  }
  if (A <= 1e-18) {
    t = E > 0.0 ? F / E : 0.0;
  } else {
    const double C = dot(d1, r);
    if (E <= 1e-18) {
      s = -C / A;
    } else {
      const double B = dot(d1, d2);
      const double denom = A * E - B * B;
      s = denom > 1e-18 ? (B * F - C * E) / denom : 0.0;
      s = s < 0.0 ? 0.0 : (s > 1.0 ? 1.0 : s);
      t = (B * s + F) / E;
      if (t < 0.0) {
        t = 0.0;
        s = -C / A;
      } else if (t > 1.0) {
        t = 1.0;
        s = (B - C) / A;
      }
    }
  }
  s = s < 0.0 ? 0.0 : (s > 1.0 ? 1.0 : s);
  t = t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
  p1 = a1 + d1 * s;
  p2 = a2 + d2 * t;
}

}  // namespace softhand

#pragma once

#include <cmath>
#include <numbers>

namespace fol {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
};

constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 normalized(Vec2 a) { return a * (1.0 / norm(a)); }
constexpr Vec2 perp(Vec2 a) { return {-a.y, a.x}; }

/// Row-major 2x2 matrix.
struct Mat2 {
  double a = 0.0, b = 0.0;
  double c = 0.0, d = 0.0;

  constexpr double det() const { return a * d - b * c; }
  constexpr double trace() const { return a + d; }
  constexpr Mat2 inverse() const {
    const double k = 1.0 / det();
    return {d * k, -b * k, -c * k, a * k};
  }
  constexpr Mat2 transpose() const { return {a, c, b, d}; }
};

constexpr Vec2 operator*(const Mat2& m, Vec2 v) { return {m.a * v.x + m.b * v.y, m.c * v.x + m.d * v.y}; }
constexpr Mat2 operator*(const Mat2& m, const Mat2& n) {
  return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d, m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
}
constexpr Mat2 operator+(const Mat2& m, const Mat2& n) { return {m.a + n.a, m.b + n.b, m.c + n.c, m.d + n.d}; }
constexpr Mat2 operator*(double s, const Mat2& m) { return {s * m.a, s * m.b, s * m.c, s * m.d}; }

/// Representative in [0,1).
inline double wrap01(double x) {
  double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}
inline Vec2 wrap01(Vec2 p) { return {wrap01(p.x), wrap01(p.y)}; }

/// Signed minimal-image difference, in [-1/2, 1/2).
inline double wrap_delta(double d) { return d - std::floor(d + 0.5); }
inline Vec2 wrap_delta(Vec2 d) { return {wrap_delta(d.x), wrap_delta(d.y)}; }

inline double circle_distance(double a, double b) { return std::abs(wrap_delta(a - b)); }
inline double torus_distance(Vec2 a, Vec2 b) { return norm(wrap_delta(a - b)); }

/// Unsigned angle between two lines (directions modulo sign), in [0, pi/2].
inline double line_angle(Vec2 u, Vec2 v) {
  const double c = std::abs(dot(u, v)) / (norm(u) * norm(v));
  const double s = std::abs(cross(u, v)) / (norm(u) * norm(v));
  return std::atan2(s, c);
}

}  // namespace fol

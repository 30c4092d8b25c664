#pragma once

#include <array>
#include <cmath>

namespace mclab {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  Vec2 operator-() const { return {-x, -y}; }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm2(Vec2 a) { return dot(a, a); }
inline double norm(Vec2 a) { return std::sqrt(norm2(a)); }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }

/// Counterclockwise rotation by pi/2.
inline Vec2 perp(Vec2 v) { return {-v.y, v.x}; }

inline Vec2 normalized(Vec2 v) {
  double n = norm(v);
  return n > 0 ? v / n : Vec2{0, 0};
}

inline Vec2 rotate(Vec2 v, double angle) {
  double c = std::cos(angle), s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// Symmetric 2x2 matrix stored as three independent entries.
struct SymMat2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  Vec2 apply(Vec2 v) const { return {xx * v.x + xy * v.y, xy * v.x + yy * v.y}; }
  double det() const { return xx * yy - xy * xy; }
  double trace() const { return xx + yy; }
  double frobenius2() const { return xx * xx + 2.0 * xy * xy + yy * yy; }

  /// Eigenvalues in ascending order.
  std::array<double, 2> eigenvalues() const {
    double mean = 0.5 * (xx + yy);
    double diff = 0.5 * (xx - yy);
    double rad = std::sqrt(diff * diff + xy * xy);
    return {mean - rad, mean + rad};
  }

  SymMat2 operator+(const SymMat2& o) const { return {xx + o.xx, xy + o.xy, yy + o.yy}; }
  SymMat2 operator*(double s) const { return {xx * s, xy * s, yy * s}; }
};

/// Twice the signed area of triangle (a, b, c); positive for counterclockwise.
inline double orient2d(Vec2 a, Vec2 b, Vec2 c) {
  return cross(b - a, c - a);
}

inline double triangle_area(Vec2 a, Vec2 b, Vec2 c) {
  return 0.5 * orient2d(a, b, c);
}

}  // namespace mclab

#pragma once

#include <cmath>

namespace projumb {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point2, Point2) = default;
};

using Vec2 = Point2;

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

/// Row-major 2x2 matrix [[a, b], [c, d]].
struct Mat2 {
  double a = 1.0, b = 0.0;
  double c = 0.0, d = 1.0;

  static Mat2 identity() { return {}; }
  static Mat2 diag(double u, double v) { return {u, 0.0, 0.0, v}; }
  static Mat2 rotation(double angle) {
    const double cs = std::cos(angle), sn = std::sin(angle);
    return {cs, -sn, sn, cs};
  }
  /// Columns u and v.
  static Mat2 columns(Vec2 u, Vec2 v) { return {u.x, v.x, u.y, v.y}; }

  double det() const { return a * d - b * c; }
  Vec2 operator*(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
  friend Mat2 operator*(const Mat2& m, const Mat2& n) {
    return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d,
            m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
  }
};

/// Axis-aligned rectangle [xmin,xmax] x [ymin,ymax].
struct Window {
  double xmin = -1.0, xmax = 1.0;
  double ymin = -1.0, ymax = 1.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double diameter() const { return std::hypot(width(), height()); }
  bool valid() const { return xmax > xmin && ymax > ymin; }
  bool contains(Point2 p, double slack = 0.0) const {
    return p.x >= xmin - slack && p.x <= xmax + slack && p.y >= ymin - slack &&
           p.y <= ymax + slack;
  }
};

/// Real number or the projective point at infinity.
struct ExtendedReal {
  double value = 0.0;
  bool infinite = false;

  static ExtendedReal finite(double v) { return {v, false}; }
  static ExtendedReal infinity() { return {0.0, true}; }
};

inline int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace projumb

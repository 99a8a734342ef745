#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>

namespace veflow {

using Vec2 = Eigen::Vector2d;

inline double cross2(const Vec2& a, const Vec2& b) {
  return a.x() * b.y() - a.y() * b.x();
}

// Twice the signed area of (a, b, c); positive for counter-clockwise order.
inline double orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
  return cross2(b - a, c - a);
}

inline double triangle_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * orient2d(a, b, c);
}

inline double dist_point_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

// Closed segment intersection test (shared endpoints count as intersecting).
inline bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1,
                               const Vec2& q2) {
  const double d1 = orient2d(q1, q2, p1);
  const double d2 = orient2d(q1, q2, p2);
  const double d3 = orient2d(p1, p2, q1);
  const double d4 = orient2d(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  auto on_segment = [](const Vec2& a, const Vec2& b, const Vec2& c) {
    return std::min(a.x(), b.x()) - 1e-14 <= c.x() &&
           c.x() <= std::max(a.x(), b.x()) + 1e-14 &&
           std::min(a.y(), b.y()) - 1e-14 <= c.y() &&
           c.y() <= std::max(a.y(), b.y()) + 1e-14;
  };
  if (d1 == 0 && on_segment(q1, q2, p1)) return true;
  if (d2 == 0 && on_segment(q1, q2, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, q1)) return true;
  if (d4 == 0 && on_segment(p1, p2, q2)) return true;
  return false;
}

inline bool point_in_triangle(const Vec2& p, const Vec2& a, const Vec2& b,
                              const Vec2& c, double tol = 1e-12) {
  const double area2 = orient2d(a, b, c);
  const double s = tol * std::abs(area2);
  return orient2d(a, b, p) >= -s && orient2d(b, c, p) >= -s &&
         orient2d(c, a, p) >= -s;
}

// Does the closed segment intersect the closed triangle?
inline bool segment_intersects_triangle(const Vec2& s0, const Vec2& s1,
                                        const Vec2& a, const Vec2& b,
                                        const Vec2& c) {
  if (point_in_triangle(s0, a, b, c) || point_in_triangle(s1, a, b, c))
    return true;
  return segments_intersect(s0, s1, a, b) || segments_intersect(s0, s1, b, c) ||
         segments_intersect(s0, s1, c, a);
}

struct Rect {
  double x0{0}, y0{0}, x1{1}, y1{1};
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  bool contains(const Vec2& p, double tol = 0.0) const {
    return p.x() >= x0 - tol && p.x() <= x1 + tol && p.y() >= y0 - tol &&
           p.y() <= y1 + tol;
  }
};

}  // namespace veflow

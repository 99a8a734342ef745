#include "veflow/curve.hpp"

#include <algorithm>
#include <cmath>

#include "veflow/errors.hpp"

namespace veflow {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

PolygonalCurve build_polygon(CurvePreset preset, const Vec2& center, double a,
                             double b, int n) {
  if (n < 3) throw Error("build_polygon: need at least 3 vertices");
  if (!(a > 0.0) || !(b > 0.0))
    throw Error("build_polygon: axes must be positive");
  if (preset == CurvePreset::Circle) b = a;
  PolygonalCurve curve;
  curve.vertices.reserve(n);
  for (int k = 0; k < n; ++k) {
    const double phi = 2.0 * kPi * static_cast<double>(k) / n;
    curve.vertices.emplace_back(center.x() + a * std::cos(phi),
                                center.y() + b * std::sin(phi));
  }
  curve.normals = element_normals(curve);
  return curve;
}

std::vector<Vec2> element_normals(const PolygonalCurve& curve) {
  const int n = curve.size();
  std::vector<Vec2> normals(n);
  for (int k = 0; k < n; ++k) {
    const Vec2 t = curve.vertices[(k + 1) % n] - curve.vertices[k];
    const double len = t.norm();
    if (len < 1e-14)
      throw DegenerateSegment("element_normals: zero-length segment");
    normals[k] = Vec2(t.y(), -t.x()) / len;
  }
  return normals;
}

std::pair<VertexNormalSet, int> vertex_normals_span(
    const PolygonalCurve& curve) {
  const int n = curve.size();
  VertexNormalSet set;
  set.omega.resize(n);
  double max_norm = 0.0;
  for (int k = 0; k < n; ++k) {
    const int prev = (k + n - 1) % n;
    const double lp = curve.segment_length(prev);
    const double lk = curve.segment_length(k);
    set.omega[k] =
        (lp * curve.normals[prev] + lk * curve.normals[k]) / (lp + lk);
    max_norm = std::max(max_norm, set.omega[k].norm());
  }
  // Numerical rank of the omega family via its 2x2 Gram matrix.
  Eigen::Matrix2d gram = Eigen::Matrix2d::Zero();
  for (const Vec2& w : set.omega) gram += w * w.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(gram);
  const double tol = 1e-10 * std::max(1e-300, max_norm);
  int rank = 0;
  for (int i = 0; i < 2; ++i)
    if (std::sqrt(std::max(0.0, es.eigenvalues()[i])) > tol) ++rank;
  return {set, rank};
}

bool curve_self_intersects(const PolygonalCurve& curve) {
  const int n = curve.size();
  for (int i = 0; i < n; ++i) {
    const Vec2& a0 = curve.vertices[i];
    const Vec2& a1 = curve.vertices[(i + 1) % n];
    for (int j = i + 1; j < n; ++j) {
      // Segments sharing a vertex always touch; skip adjacency.
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      const Vec2& b0 = curve.vertices[j];
      const Vec2& b1 = curve.vertices[(j + 1) % n];
      if (segments_intersect(a0, a1, b0, b1)) return true;
    }
  }
  return false;
}

double polygon_area(const PolygonalCurve& curve) {
  const int n = curve.size();
  double twice_area = 0.0;
  for (int k = 0; k < n; ++k)
    twice_area += cross2(curve.vertices[k], curve.vertices[(k + 1) % n]);
  return 0.5 * twice_area;
}

double polygon_length(const PolygonalCurve& curve) {
  double len = 0.0;
  for (int k = 0; k < curve.size(); ++k) len += curve.segment_length(k);
  return len;
}

double polygon_moment_y(const PolygonalCurve& curve) {
  // Green's theorem: integral of y over the enclosed region equals
  // (1/6) sum (y_k + y_{k+1}) (x_k y_{k+1} - x_{k+1} y_k).
  const int n = curve.size();
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    const Vec2& p = curve.vertices[k];
    const Vec2& q = curve.vertices[(k + 1) % n];
    sum += (p.y() + q.y()) * cross2(p, q);
  }
  return sum / 6.0;
}

std::pair<double, double> polygon_geometry(const PolygonalCurve& curve) {
  if (curve_self_intersects(curve))
    throw SelfIntersectingInterface("polygon_geometry: curve self-intersects");
  return {polygon_area(curve), polygon_length(curve)};
}

PolygonalCurve refine_long_elements(const PolygonalCurve& curve,
                                    double vol_max) {
  if (!(vol_max > 0.0))
    throw Error("refine_long_elements: vol_max must be positive");
  PolygonalCurve out;
  const int n = curve.size();
  out.vertices.reserve(n);
  for (int k = 0; k < n; ++k) {
    out.vertices.push_back(curve.vertices[k]);
    if (curve.segment_length(k) >= 1.5 * vol_max)
      out.vertices.push_back(curve.segment_midpoint(k));
  }
  out.normals = element_normals(out);
  return out;
}

double quality_ratio(const PolygonalCurve& curve) {
  double lmin = std::numeric_limits<double>::infinity();
  double lmax = 0.0;
  for (int k = 0; k < curve.size(); ++k) {
    const double l = curve.segment_length(k);
    lmin = std::min(lmin, l);
    lmax = std::max(lmax, l);
  }
  return lmax / lmin;
}

double surface_products(const PolygonalCurve& curve, const SurfaceField& a,
                        const SurfaceField& b, ProductMode mode) {
  const int n = curve.size();
  auto check = [n](const SurfaceField& f) {
    if (f.values.size() != n)
      throw ShapeMismatch("surface_products: field size does not match curve");
  };
  check(a);
  check(b);

  // One-sided endpoint values of a field within segment k.
  auto at = [n](const SurfaceField& f, int segment, int end) {
    if (f.layout == SurfaceField::Layout::Segment) return f.values[segment];
    return f.values[(segment + end) % n];
  };

  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    const double len = curve.segment_length(k);
    const double a0 = at(a, k, 0), a1 = at(a, k, 1);
    const double b0 = at(b, k, 0), b1 = at(b, k, 1);
    if (mode == ProductMode::Lumped) {
      sum += 0.5 * len * (a0 * b0 + a1 * b1);
    } else {
      // Simpson, exact for the piecewise-quadratic product.
      const double am = 0.5 * (a0 + a1), bm = 0.5 * (b0 + b1);
      sum += len / 6.0 * (a0 * b0 + 4.0 * am * bm + a1 * b1);
    }
  }
  return sum;
}

bool point_inside_curve(const PolygonalCurve& curve, const Vec2& p) {
  // Crossing number; points on the boundary are resolved by the caller.
  const int n = curve.size();
  bool inside = false;
  for (int k = 0; k < n; ++k) {
    const Vec2& a = curve.vertices[k];
    const Vec2& b = curve.vertices[(k + 1) % n];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x_cross = a.x() + (p.y() - a.y()) / (b.y() - a.y()) *
                                          (b.x() - a.x());
      if (p.x() < x_cross) inside = !inside;
    }
  }
  return inside;
}

double distance_to_curve(const PolygonalCurve& curve, const Vec2& p) {
  double d = std::numeric_limits<double>::infinity();
  const int n = curve.size();
  for (int k = 0; k < n; ++k)
    d = std::min(d, dist_point_segment(p, curve.vertices[k],
                                       curve.vertices[(k + 1) % n]));
  return d;
}

}  // namespace veflow

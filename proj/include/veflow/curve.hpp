#pragma once

#include <Eigen/Dense>
#include <vector>

#include "veflow/geometry.hpp"

namespace veflow {

// Closed oriented polygonal interface with per-segment unit normals. Segment
// k connects vertices[k] to vertices[(k+1) % size]. For counter-clockwise
// orientation the normals point out of the enclosed region, i.e. into the
// outer phase.
struct PolygonalCurve {
  std::vector<Vec2> vertices;
  std::vector<Vec2> normals;  // per segment, unit length

  int size() const { return static_cast<int>(vertices.size()); }
  const Vec2& vertex(int k) const { return vertices[k % vertices.size()]; }
  Vec2 segment_vector(int k) const {
    return vertices[(k + 1) % vertices.size()] - vertices[k];
  }
  double segment_length(int k) const { return segment_vector(k).norm(); }
  Vec2 segment_midpoint(int k) const {
    return 0.5 * (vertices[k] + vertices[(k + 1) % vertices.size()]);
  }
};

struct VertexNormalSet {
  std::vector<Vec2> omega;  // length-weighted normal averages per vertex
};

enum class CurvePreset { Circle, Ellipse };

// q_k = center + (a cos phi_k, b sin phi_k), phi_k = 2 pi k / n.
PolygonalCurve build_polygon(CurvePreset preset, const Vec2& center, double a,
                             double b, int n);
inline PolygonalCurve build_circle(const Vec2& center, double r, int n) {
  return build_polygon(CurvePreset::Circle, center, r, r, n);
}

// Recompute per-segment outward unit normals (right-hand rotation of the
// tangent). Throws DegenerateSegment below length 1e-14.
std::vector<Vec2> element_normals(const PolygonalCurve& curve);

std::pair<VertexNormalSet, int> vertex_normals_span(
    const PolygonalCurve& curve);

// (signed shoelace area, total length); throws SelfIntersectingInterface.
std::pair<double, double> polygon_geometry(const PolygonalCurve& curve);

// Area/length without the self-intersection sweep, for inner loops where the
// check already ran this step.
double polygon_area(const PolygonalCurve& curve);
double polygon_length(const PolygonalCurve& curve);
double polygon_moment_y(const PolygonalCurve& curve);  // integral of x2 over
                                                       // the enclosed region

bool curve_self_intersects(const PolygonalCurve& curve);

// Bisect every segment of length >= 1.5 * vol_max at its midpoint. Leaves the
// polygonal surface unchanged as a point set.
PolygonalCurve refine_long_elements(const PolygonalCurve& curve,
                                    double vol_max);

// max segment length / min segment length.
double quality_ratio(const PolygonalCurve& curve);

enum class ProductMode { Lumped, Exact };

// A field on the curve: values at vertices (piecewise linear) or per segment
// (piecewise constant with one-sided limits at the vertices).
struct SurfaceField {
  enum class Layout { Vertex, Segment } layout;
  Eigen::VectorXd values;
  static SurfaceField vertex(Eigen::VectorXd v) {
    return {Layout::Vertex, std::move(v)};
  }
  static SurfaceField segment(Eigen::VectorXd v) {
    return {Layout::Segment, std::move(v)};
  }
};

// Mass-lumped or Simpson-exact surface inner product of two fields.
double surface_products(const PolygonalCurve& curve, const SurfaceField& a,
                        const SurfaceField& b, ProductMode mode);

bool point_inside_curve(const PolygonalCurve& curve, const Vec2& p);

// Distance from p to the curve (minimum over segments).
double distance_to_curve(const PolygonalCurve& curve, const Vec2& p);

}  // namespace veflow

#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "veflow/curve.hpp"
#include "veflow/geometry.hpp"

namespace veflow {

enum class BoundaryTag : char { None = 0, Dirichlet = 1, Neumann = 2 };

// Conforming simplicial triangulation of a rectangle. Triangles are stored
// counter-clockwise; edge slot k of a triangle is the edge opposite local
// vertex k, i.e. (v_{k+1}, v_{k+2}).
struct Triangulation {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::array<int, 3>> neighbors;  // -1 across boundary edges
  std::vector<std::array<BoundaryTag, 3>> edge_tags;
  std::vector<int> generation;
  Rect domain;

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_triangles() const { return static_cast<int>(triangles.size()); }
  double triangle_area(int t) const {
    const auto& tri = triangles[t];
    return veflow::triangle_area(vertices[tri[0]], vertices[tri[1]],
                                 vertices[tri[2]]);
  }
  Vec2 barycenter(int t) const {
    const auto& tri = triangles[t];
    return (vertices[tri[0]] + vertices[tri[1]] + vertices[tri[2]]) / 3.0;
  }
};

enum class ElemClass : char { InteriorMinus, InteriorPlus, Interfacial };

struct ElementClassification {
  std::vector<ElemClass> cls;
  int size() const { return static_cast<int>(cls.size()); }
};

// Piecewise-constant per-element field realizing a two-phase coefficient.
using PhaseFieldValues = Eigen::VectorXd;

// Structured grid of square cells of side (x1-x0)/n_c, each cell split into
// two triangles by a fixed diagonal. The rectangle height must be an integer
// multiple of the cell side. The whole boundary is tagged Dirichlet.
Triangulation uniform_mesh(const Rect& rect, int n_c);

// Longest-edge bisection of the marked triangles with conforming closure.
// More elements than the marked ones may be refined.
Triangulation bisect_refine(const Triangulation& mesh,
                            const std::vector<int>& marked);

// Partition into interior/exterior/interfacial elements against the curve.
ElementClassification classify_elements(const Triangulation& mesh,
                                        const PolygonalCurve& gamma);

// Iterated marking and bisection until no element intersecting the interface
// has area above h_f^2 (the area threshold 2 h_f^d / d! for d = 2). Neighbors
// of marked elements are refined along.
Triangulation adapt_to_interface(const Triangulation& coarse,
                                 const PolygonalCurve& gamma, double h_f);

PhaseFieldValues phase_field(const ElementClassification& cls, double v_minus,
                             double v_plus);

// True iff every interior angle is at most pi/2 (+1e-12 slack); also returns
// the violating triangles.
std::pair<bool, std::vector<int>> non_obtuse_check(const Triangulation& mesh);

// Re-tag boundary edges whose midpoint satisfies the predicate.
template <typename Pred>
void set_boundary_tag(Triangulation& mesh, Pred&& pred, BoundaryTag tag) {
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    for (int k = 0; k < 3; ++k) {
      if (mesh.neighbors[t][k] != -1) continue;
      const Vec2 mid = 0.5 * (mesh.vertices[mesh.triangles[t][(k + 1) % 3]] +
                              mesh.vertices[mesh.triangles[t][(k + 2) % 3]]);
      if (pred(mid)) mesh.edge_tags[t][k] = tag;
    }
  }
}

}  // namespace veflow

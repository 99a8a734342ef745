#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "veflow/curve.hpp"
#include "veflow/mesh.hpp"
#include "veflow/quadrature.hpp"
#include "veflow/symmat.hpp"

namespace veflow {

enum class SpaceKind : char { P0, P1, P2 };
enum class ValueRank : char { Scalar, Vector2, SymTensor2 };

// Lagrange space on a triangulation. Scalar nodes are vertices (P1),
// vertices followed by edge midpoints (P2), or cells (P0). Vector and
// symmetric-tensor ranks interleave components per node, so
// dof = node * components + component.
struct FESpace {
  const Triangulation* mesh{nullptr};
  SpaceKind kind{SpaceKind::P1};
  ValueRank rank{ValueRank::Scalar};

  int n_edges{0};
  std::vector<std::array<int, 3>> cell_edges;  // edge id opposite vertex k
  std::vector<char> node_dirichlet;            // per scalar node
  std::vector<Vec2> node_points;               // coordinates per scalar node

  int components() const {
    switch (rank) {
      case ValueRank::Scalar:
        return 1;
      case ValueRank::Vector2:
        return 2;
      case ValueRank::SymTensor2:
        return 3;
    }
    return 1;
  }
  int n_scalar_nodes() const {
    switch (kind) {
      case SpaceKind::P0:
        return mesh->n_triangles();
      case SpaceKind::P1:
        return mesh->n_vertices();
      case SpaceKind::P2:
        return mesh->n_vertices() + n_edges;
    }
    return 0;
  }
  int dofs() const { return components() * n_scalar_nodes(); }
  int dof(int node, int comp) const { return node * components() + comp; }
  int nodes_per_cell() const {
    switch (kind) {
      case SpaceKind::P0:
        return 1;
      case SpaceKind::P1:
        return 3;
      case SpaceKind::P2:
        return 6;
    }
    return 0;
  }
  // Scalar node ids on a cell: vertices first, then edge midpoints in the
  // slot order (edge k opposite vertex k).
  void cell_nodes(int t, std::array<int, 6>& nodes) const;
  bool dof_is_dirichlet(int d) const {
    return node_dirichlet[d / components()] != 0;
  }
};

// Dof map deterministic given the mesh; Dirichlet set collects the scalar
// nodes lying on Dirichlet-tagged boundary edges.
FESpace build_space(const Triangulation& mesh, SpaceKind kind, ValueRank rank);

struct FEFunction {
  const FESpace* space{nullptr};
  Eigen::VectorXd coeffs;

  FEFunction() = default;
  explicit FEFunction(const FESpace& s)
      : space(&s), coeffs(Eigen::VectorXd::Zero(s.dofs())) {}

  double value_scalar(int tri, const std::array<double, 3>& bary) const;
  Vec2 value_vector(int tri, const std::array<double, 3>& bary) const;
  SymMat2 value_tensor(int tri, const std::array<double, 3>& bary) const;
  // Jacobian of a vector-valued function: (grad u)_{ij} = du_i / dx_j.
  Eigen::Matrix2d gradient_vector(int tri,
                                  const std::array<double, 3>& bary) const;
  Vec2 gradient_scalar(int tri, const std::array<double, 3>& bary) const;
  SymMat2 node_tensor(int node) const {
    return {coeffs[node * 3 + 0], coeffs[node * 3 + 1], coeffs[node * 3 + 2]};
  }
  void set_node_tensor(int node, const SymMat2& m) {
    coeffs[node * 3 + 0] = m.a11;
    coeffs[node * 3 + 1] = m.a12;
    coeffs[node * 3 + 2] = m.a22;
  }
};

// Scalar basis values / gradients of a cell's local basis at a barycentric
// point. P1 has 3 entries, P2 has 6 (vertex then edge functions).
void basis_values(SpaceKind kind, const std::array<double, 3>& bary,
                  std::array<double, 6>& out);
void basis_gradients(const Triangulation& mesh, int tri, SpaceKind kind,
                     const std::array<double, 3>& bary,
                     std::array<Vec2, 6>& out);
// Constant P1 hat gradients on a cell.
std::array<Vec2, 3> p1_gradients(const Triangulation& mesh, int tri);

// Nodal interpolation (P1/P2) or element-mean projection (P0) of a callable
// field. Exact on polynomials up to the space degree.
FEFunction interpolate(const FESpace& space,
                       const std::function<double(const Vec2&)>& f);
FEFunction interpolate_vector(const FESpace& space,
                              const std::function<Vec2(const Vec2&)>& f);
FEFunction interpolate_tensor(const FESpace& space,
                              const std::function<SymMat2(const Vec2&)>& f);

enum class BulkProductMode : char { Lumped, Exact };

// Mass-lumped or Gauss-exact bulk inner product of two scalar FE functions
// (possibly on different spaces over the same mesh).
double bulk_products(const FEFunction& a, const FEFunction& b,
                     BulkProductMode mode);

// Uniform background grid for point location with brute-force fallback.
struct PointLocator {
  const Triangulation* mesh{nullptr};
  Rect box;
  int nx{1}, ny{1};
  double hx{1}, hy{1};
  std::vector<std::vector<int>> bins;

  explicit PointLocator(const Triangulation& mesh);
  // Containing triangle and barycentric coordinates; throws PointOutsideMesh
  // when the point lies outside the mesh beyond tolerance.
  std::pair<int, std::array<double, 3>> locate(const Vec2& p) const;
  std::vector<int> candidates(double x0, double y0, double x1,
                              double y1) const;
};

std::array<double, 3> barycentric(const Triangulation& mesh, int tri,
                                  const Vec2& p);

// One quadrature sample of the interface running through the bulk mesh:
// interface segments are split at bulk-element boundaries and each
// sub-segment carries a 3-point Gauss rule.
struct InterfaceQuadSample {
  int segment{0};             // interface segment index
  int tri{0};                 // bulk triangle containing the point
  std::array<double, 3> bary{};  // barycentric coordinates in tri
  Vec2 point;
  Vec2 normal;                // interface normal of the segment
  double weight{0};           // arc-length weight
  double t{0};                // parameter on the segment, in [0, 1]
};

// Locate the interface inside the bulk mesh. Throws PointOutsideMesh if a
// piece of a segment cannot be covered by bulk elements.
std::vector<InterfaceQuadSample> interface_coupling_eval(
    const Triangulation& mesh, const PointLocator& locator,
    const PolygonalCurve& curve);

// Pressure space assembled from P1, optionally P0 (one cell dof dropped to
// keep the sum direct), optionally the characteristic function of the inner
// phase as a single extra dof.
struct PressureSpace {
  FESpace p1;
  bool with_p0{false};
  int n_p0{0};  // mesh cells minus one when enabled
  bool with_xfem{false};
  // layout: [p1 nodes][p0 cells 0..n_p0-1][xfem]
  int dofs() const { return p1.dofs() + n_p0 + (with_xfem ? 1 : 0); }
  int xfem_dof() const { return p1.dofs() + n_p0; }
};

PressureSpace build_pressure_space(const Triangulation& mesh, bool with_p0);

// Append the single characteristic-function dof of the inner phase. The
// classification snapshot identifies where the new basis function lives; its
// divergence-row entries are interface integrals of the velocity basis.
PressureSpace xfem_enrich(const PressureSpace& space,
                          const ElementClassification& cls);

// Divergence-constraint column of the characteristic function of the inner
// phase: entry j equals the boundary flux integral of velocity basis j over
// the interface.
Eigen::VectorXd xfem_divergence_column(
    const FESpace& velocity_space,
    const std::vector<InterfaceQuadSample>& quad);

// Pointwise value of the characteristic basis function (1 in the inner
// phase): classification answers clean cells, geometry answers cut cells.
double xfem_basis_value(const ElementClassification& cls,
                        const PolygonalCurve& curve, int tri, const Vec2& p);

}  // namespace veflow

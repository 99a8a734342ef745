#include "veflow/fem.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "veflow/errors.hpp"

namespace veflow {

namespace {

// Deterministic edge enumeration by first appearance in cell order.
void build_edges(const Triangulation& mesh, int& n_edges,
                 std::vector<std::array<int, 3>>& cell_edges) {
  std::map<std::pair<int, int>, int> edge_ids;
  cell_edges.assign(mesh.n_triangles(), {-1, -1, -1});
  n_edges = 0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const int a = mesh.triangles[t][(k + 1) % 3];
      const int b = mesh.triangles[t][(k + 2) % 3];
      const auto key = std::minmax(a, b);
      auto it = edge_ids.find(key);
      if (it == edge_ids.end()) it = edge_ids.emplace(key, n_edges++).first;
      cell_edges[t][k] = it->second;
    }
  }
}

}  // namespace

void FESpace::cell_nodes(int t, std::array<int, 6>& nodes) const {
  const auto& tri = mesh->triangles[t];
  switch (kind) {
    case SpaceKind::P0:
      nodes[0] = t;
      break;
    case SpaceKind::P1:
      nodes[0] = tri[0];
      nodes[1] = tri[1];
      nodes[2] = tri[2];
      break;
    case SpaceKind::P2:
      nodes[0] = tri[0];
      nodes[1] = tri[1];
      nodes[2] = tri[2];
      for (int k = 0; k < 3; ++k)
        nodes[3 + k] = mesh->n_vertices() + cell_edges[t][k];
      break;
  }
}

FESpace build_space(const Triangulation& mesh, SpaceKind kind,
                    ValueRank rank) {
  FESpace space;
  space.mesh = &mesh;
  space.kind = kind;
  space.rank = rank;
  if (kind == SpaceKind::P2) build_edges(mesh, space.n_edges, space.cell_edges);

  const int n = space.n_scalar_nodes();
  space.node_points.resize(n);
  space.node_dirichlet.assign(n, 0);

  switch (kind) {
    case SpaceKind::P0:
      for (int t = 0; t < mesh.n_triangles(); ++t)
        space.node_points[t] = mesh.barycenter(t);
      break;
    case SpaceKind::P1:
      for (int v = 0; v < mesh.n_vertices(); ++v)
        space.node_points[v] = mesh.vertices[v];
      break;
    case SpaceKind::P2: {
      for (int v = 0; v < mesh.n_vertices(); ++v)
        space.node_points[v] = mesh.vertices[v];
      for (int t = 0; t < mesh.n_triangles(); ++t)
        for (int k = 0; k < 3; ++k) {
          const int a = mesh.triangles[t][(k + 1) % 3];
          const int b = mesh.triangles[t][(k + 2) % 3];
          space.node_points[mesh.n_vertices() + space.cell_edges[t][k]] =
              0.5 * (mesh.vertices[a] + mesh.vertices[b]);
        }
      break;
    }
  }

  // Dirichlet nodes: endpoints and midpoints of Dirichlet-tagged boundary
  // edges (meaningful for the nodal spaces only).
  if (kind != SpaceKind::P0) {
    for (int t = 0; t < mesh.n_triangles(); ++t)
      for (int k = 0; k < 3; ++k) {
        if (mesh.neighbors[t][k] != -1) continue;
        if (mesh.edge_tags[t][k] != BoundaryTag::Dirichlet) continue;
        space.node_dirichlet[mesh.triangles[t][(k + 1) % 3]] = 1;
        space.node_dirichlet[mesh.triangles[t][(k + 2) % 3]] = 1;
        if (kind == SpaceKind::P2)
          space.node_dirichlet[mesh.n_vertices() + space.cell_edges[t][k]] = 1;
      }
  }
  return space;
}

void basis_values(SpaceKind kind, const std::array<double, 3>& bary,
                  std::array<double, 6>& out) {
  const double l0 = bary[0], l1 = bary[1], l2 = bary[2];
  switch (kind) {
    case SpaceKind::P0:
      out[0] = 1.0;
      break;
    case SpaceKind::P1:
      out[0] = l0;
      out[1] = l1;
      out[2] = l2;
      break;
    case SpaceKind::P2:
      out[0] = l0 * (2.0 * l0 - 1.0);
      out[1] = l1 * (2.0 * l1 - 1.0);
      out[2] = l2 * (2.0 * l2 - 1.0);
      out[3] = 4.0 * l1 * l2;
      out[4] = 4.0 * l2 * l0;
      out[5] = 4.0 * l0 * l1;
      break;
  }
}

std::array<Vec2, 3> p1_gradients(const Triangulation& mesh, int tri) {
  const auto& t = mesh.triangles[tri];
  Eigen::Matrix2d jac;
  jac.col(0) = mesh.vertices[t[1]] - mesh.vertices[t[0]];
  jac.col(1) = mesh.vertices[t[2]] - mesh.vertices[t[0]];
  const Eigen::Matrix2d inv = jac.inverse();
  std::array<Vec2, 3> g;
  g[1] = inv.row(0);
  g[2] = inv.row(1);
  g[0] = -g[1] - g[2];
  return g;
}

void basis_gradients(const Triangulation& mesh, int tri, SpaceKind kind,
                     const std::array<double, 3>& bary,
                     std::array<Vec2, 6>& out) {
  const auto grad = p1_gradients(mesh, tri);
  switch (kind) {
    case SpaceKind::P0:
      out[0] = Vec2::Zero();
      break;
    case SpaceKind::P1:
      out[0] = grad[0];
      out[1] = grad[1];
      out[2] = grad[2];
      break;
    case SpaceKind::P2:
      for (int i = 0; i < 3; ++i) out[i] = (4.0 * bary[i] - 1.0) * grad[i];
      out[3] = 4.0 * (bary[1] * grad[2] + bary[2] * grad[1]);
      out[4] = 4.0 * (bary[2] * grad[0] + bary[0] * grad[2]);
      out[5] = 4.0 * (bary[0] * grad[1] + bary[1] * grad[0]);
      break;
  }
}

double FEFunction::value_scalar(int tri,
                                const std::array<double, 3>& bary) const {
  std::array<int, 6> nodes;
  std::array<double, 6> phi;
  space->cell_nodes(tri, nodes);
  basis_values(space->kind, bary, phi);
  double v = 0.0;
  for (int i = 0; i < space->nodes_per_cell(); ++i)
    v += phi[i] * coeffs[nodes[i]];
  return v;
}

Vec2 FEFunction::value_vector(int tri,
                              const std::array<double, 3>& bary) const {
  std::array<int, 6> nodes;
  std::array<double, 6> phi;
  space->cell_nodes(tri, nodes);
  basis_values(space->kind, bary, phi);
  Vec2 v = Vec2::Zero();
  for (int i = 0; i < space->nodes_per_cell(); ++i) {
    v.x() += phi[i] * coeffs[space->dof(nodes[i], 0)];
    v.y() += phi[i] * coeffs[space->dof(nodes[i], 1)];
  }
  return v;
}

SymMat2 FEFunction::value_tensor(int tri,
                                 const std::array<double, 3>& bary) const {
  std::array<int, 6> nodes;
  std::array<double, 6> phi;
  space->cell_nodes(tri, nodes);
  basis_values(space->kind, bary, phi);
  SymMat2 v = SymMat2::zero();
  for (int i = 0; i < space->nodes_per_cell(); ++i)
    v += phi[i] * node_tensor(nodes[i]);
  return v;
}

Eigen::Matrix2d FEFunction::gradient_vector(
    int tri, const std::array<double, 3>& bary) const {
  std::array<int, 6> nodes;
  std::array<Vec2, 6> dphi;
  space->cell_nodes(tri, nodes);
  basis_gradients(*space->mesh, tri, space->kind, bary, dphi);
  Eigen::Matrix2d g = Eigen::Matrix2d::Zero();
  for (int i = 0; i < space->nodes_per_cell(); ++i) {
    g.row(0) += coeffs[space->dof(nodes[i], 0)] * dphi[i].transpose();
    g.row(1) += coeffs[space->dof(nodes[i], 1)] * dphi[i].transpose();
  }
  return g;
}

Vec2 FEFunction::gradient_scalar(int tri,
                                 const std::array<double, 3>& bary) const {
  std::array<int, 6> nodes;
  std::array<Vec2, 6> dphi;
  space->cell_nodes(tri, nodes);
  basis_gradients(*space->mesh, tri, space->kind, bary, dphi);
  Vec2 g = Vec2::Zero();
  for (int i = 0; i < space->nodes_per_cell(); ++i)
    g += coeffs[nodes[i]] * dphi[i];
  return g;
}

namespace {

template <typename SetNode, typename CellMean>
void interpolate_impl(const FESpace& space, SetNode&& set_node,
                      CellMean&& cell_mean) {
  if (space.kind == SpaceKind::P0) {
    for (int t = 0; t < space.mesh->n_triangles(); ++t) cell_mean(t);
  } else {
    for (int n = 0; n < space.n_scalar_nodes(); ++n)
      set_node(n, space.node_points[n]);
  }
}

}  // namespace

FEFunction interpolate(const FESpace& space,
                       const std::function<double(const Vec2&)>& f) {
  FEFunction out(space);
  interpolate_impl(
      space, [&](int n, const Vec2& p) { out.coeffs[n] = f(p); },
      [&](int t) {
        const auto& tri = space.mesh->triangles[t];
        double mean = 0.0;
        for (const auto& q : tri_quadrature_deg5()) {
          const Vec2 p = q.l0 * space.mesh->vertices[tri[0]] +
                         q.l1 * space.mesh->vertices[tri[1]] +
                         q.l2 * space.mesh->vertices[tri[2]];
          mean += q.weight * f(p);
        }
        out.coeffs[t] = mean;
      });
  return out;
}

FEFunction interpolate_vector(const FESpace& space,
                              const std::function<Vec2(const Vec2&)>& f) {
  FEFunction out(space);
  for (int n = 0; n < space.n_scalar_nodes(); ++n) {
    const Vec2 v = f(space.node_points[n]);
    out.coeffs[space.dof(n, 0)] = v.x();
    out.coeffs[space.dof(n, 1)] = v.y();
  }
  return out;
}

FEFunction interpolate_tensor(const FESpace& space,
                              const std::function<SymMat2(const Vec2&)>& f) {
  FEFunction out(space);
  for (int n = 0; n < space.n_scalar_nodes(); ++n)
    out.set_node_tensor(n, f(space.node_points[n]));
  return out;
}

double bulk_products(const FEFunction& a, const FEFunction& b,
                     BulkProductMode mode) {
  const FESpace& sa = *a.space;
  const FESpace& sb = *b.space;
  if (sa.mesh != sb.mesh)
    throw ShapeMismatch("bulk_products: functions live on different meshes");
  if (sa.rank != ValueRank::Scalar || sb.rank != ValueRank::Scalar)
    throw ShapeMismatch("bulk_products: scalar arguments expected");
  const Triangulation& mesh = *sa.mesh;

  double sum = 0.0;
  static const std::array<std::array<double, 3>, 3> vertex_bary = {
      {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const double area = mesh.triangle_area(t);
    if (mode == BulkProductMode::Lumped) {
      double local = 0.0;
      for (int k = 0; k < 3; ++k)
        local += a.value_scalar(t, vertex_bary[k]) *
                 b.value_scalar(t, vertex_bary[k]);
      sum += area / 3.0 * local;
    } else {
      for (const auto& q : tri_quadrature_deg5()) {
        const std::array<double, 3> bary = {q.l0, q.l1, q.l2};
        sum += area * q.weight * a.value_scalar(t, bary) *
               b.value_scalar(t, bary);
      }
    }
  }
  return sum;
}

PointLocator::PointLocator(const Triangulation& m) : mesh(&m) {
  double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
  for (const Vec2& v : m.vertices) {
    x0 = std::min(x0, v.x());
    y0 = std::min(y0, v.y());
    x1 = std::max(x1, v.x());
    y1 = std::max(y1, v.y());
  }
  box = {x0, y0, x1, y1};
  const int n = std::max(1, m.n_triangles());
  nx = ny = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(n))));
  hx = std::max(box.width() / nx, 1e-300);
  hy = std::max(box.height() / ny, 1e-300);
  bins.assign(static_cast<size_t>(nx) * ny, {});
  for (int t = 0; t < m.n_triangles(); ++t) {
    const auto& tri = m.triangles[t];
    const Vec2& a = m.vertices[tri[0]];
    const Vec2& b = m.vertices[tri[1]];
    const Vec2& c = m.vertices[tri[2]];
    const double tx0 = std::min({a.x(), b.x(), c.x()});
    const double tx1 = std::max({a.x(), b.x(), c.x()});
    const double ty0 = std::min({a.y(), b.y(), c.y()});
    const double ty1 = std::max({a.y(), b.y(), c.y()});
    int i0 = std::clamp(static_cast<int>((tx0 - box.x0) / hx), 0, nx - 1);
    int i1 = std::clamp(static_cast<int>((tx1 - box.x0) / hx), 0, nx - 1);
    int j0 = std::clamp(static_cast<int>((ty0 - box.y0) / hy), 0, ny - 1);
    int j1 = std::clamp(static_cast<int>((ty1 - box.y0) / hy), 0, ny - 1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) bins[j * nx + i].push_back(t);
  }
}

std::vector<int> PointLocator::candidates(double x0, double y0, double x1,
                                          double y1) const {
  int i0 = std::clamp(static_cast<int>((x0 - box.x0) / hx), 0, nx - 1);
  int i1 = std::clamp(static_cast<int>((x1 - box.x0) / hx), 0, nx - 1);
  int j0 = std::clamp(static_cast<int>((y0 - box.y0) / hy), 0, ny - 1);
  int j1 = std::clamp(static_cast<int>((y1 - box.y0) / hy), 0, ny - 1);
  std::vector<int> out;
  for (int j = j0; j <= j1; ++j)
    for (int i = i0; i <= i1; ++i) {
      const auto& bin = bins[j * nx + i];
      out.insert(out.end(), bin.begin(), bin.end());
    }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::array<double, 3> barycentric(const Triangulation& mesh, int tri,
                                  const Vec2& p) {
  const auto& t = mesh.triangles[tri];
  const Vec2& a = mesh.vertices[t[0]];
  const Vec2& b = mesh.vertices[t[1]];
  const Vec2& c = mesh.vertices[t[2]];
  const double area2 = orient2d(a, b, c);
  return {orient2d(p, b, c) / area2, orient2d(a, p, c) / area2,
          orient2d(a, b, p) / area2};
}

std::pair<int, std::array<double, 3>> PointLocator::locate(
    const Vec2& p) const {
  for (int t : candidates(p.x(), p.y(), p.x(), p.y())) {
    const auto bary = barycentric(*mesh, t, p);
    if (std::min({bary[0], bary[1], bary[2]}) >= -1e-12) return {t, bary};
  }
  // Brute fallback: the most interior triangle wins.
  int best = -1;
  double best_min = -1e300;
  std::array<double, 3> best_bary{};
  for (int t = 0; t < mesh->n_triangles(); ++t) {
    const auto bary = barycentric(*mesh, t, p);
    const double m = std::min({bary[0], bary[1], bary[2]});
    if (m > best_min) {
      best_min = m;
      best = t;
      best_bary = bary;
    }
  }
  if (best < 0 || best_min < -1e-9)
    throw PointOutsideMesh("locate: point outside the triangulation");
  return {best, best_bary};
}

std::vector<InterfaceQuadSample> interface_coupling_eval(
    const Triangulation& mesh, const PointLocator& locator,
    const PolygonalCurve& curve) {
  std::vector<InterfaceQuadSample> samples;
  samples.reserve(static_cast<size_t>(curve.size()) * 6);

  for (int s = 0; s < curve.size(); ++s) {
    const Vec2 q0 = curve.vertices[s];
    const Vec2 q1 = curve.vertices[(s + 1) % curve.size()];
    const double len = (q1 - q0).norm();

    // Parameter interval of the segment inside each candidate triangle
    // (intersection of three half-plane constraints).
    struct Piece {
      double a, b;
      int tri;
    };
    std::vector<Piece> pieces;
    const auto cands = locator.candidates(
        std::min(q0.x(), q1.x()), std::min(q0.y(), q1.y()),
        std::max(q0.x(), q1.x()), std::max(q0.y(), q1.y()));
    for (int t : cands) {
      const auto& tri = mesh.triangles[t];
      double lo = 0.0, hi = 1.0;
      for (int k = 0; k < 3 && lo < hi; ++k) {
        const Vec2& ea = mesh.vertices[tri[k]];
        const Vec2& eb = mesh.vertices[tri[(k + 1) % 3]];
        const double f0 = orient2d(ea, eb, q0);
        const double f1 = orient2d(ea, eb, q1);
        // Scale-aware slack keeps segments riding exactly on a mesh edge
        // inside both adjacent triangles instead of tripping on sign noise.
        const double edge_len = (eb - ea).norm();
        const double eps = 1e-12 * edge_len * std::max(len, edge_len);
        if (f0 >= -eps && f1 >= -eps) continue;
        if (f0 < eps && f1 < eps) {
          lo = 1.0;
          hi = 0.0;
          break;
        }
        const double root = f0 / (f0 - f1);
        if (f0 < f1)
          lo = std::max(lo, root);
        else
          hi = std::min(hi, root);
      }
      if (hi - lo > 1e-12) pieces.push_back({lo, hi, t});
    }
    std::sort(pieces.begin(), pieces.end(),
              [](const Piece& a, const Piece& b) { return a.a < b.a; });

    // Greedy disjoint cover of [0, 1]; pieces from elements sharing an edge
    // with the segment coincide and only one of them is kept.
    double cur = 0.0;
    size_t idx = 0;
    while (cur < 1.0 - 1e-9) {
      double best_end = cur;
      int best_tri = -1;
      for (size_t i = idx; i < pieces.size() && pieces[i].a <= cur + 1e-9;
           ++i) {
        if (pieces[i].b > best_end) {
          best_end = pieces[i].b;
          best_tri = pieces[i].tri;
        }
      }
      if (best_tri < 0)
        throw PointOutsideMesh(
            "interface_coupling_eval: interface segment leaves the mesh");
      const double a = cur, b = std::min(1.0, best_end);
      for (const auto& g : gauss3_unit()) {
        InterfaceQuadSample sample;
        sample.segment = s;
        sample.tri = best_tri;
        sample.t = a + g.t * (b - a);
        sample.point = q0 + sample.t * (q1 - q0);
        sample.bary = barycentric(mesh, best_tri, sample.point);
        sample.normal = curve.normals[s];
        sample.weight = len * (b - a) * g.weight;
        samples.push_back(sample);
      }
      while (idx < pieces.size() && pieces[idx].a <= cur + 1e-9) ++idx;
      cur = b;
    }
  }
  return samples;
}

PressureSpace build_pressure_space(const Triangulation& mesh, bool with_p0) {
  PressureSpace space;
  space.p1 = build_space(mesh, SpaceKind::P1, ValueRank::Scalar);
  space.with_p0 = with_p0;
  // The P1 + P0 sum carries a one-dimensional dependency (global constants
  // live in both parts); dropping one cell dof keeps the basis independent.
  space.n_p0 = with_p0 ? mesh.n_triangles() - 1 : 0;
  space.with_xfem = false;
  return space;
}

PressureSpace xfem_enrich(const PressureSpace& space,
                          const ElementClassification& cls) {
  if (cls.size() != space.p1.mesh->n_triangles())
    throw ShapeMismatch("xfem_enrich: stale classification");
  PressureSpace out = space;
  out.with_xfem = true;
  return out;
}

Eigen::VectorXd xfem_divergence_column(
    const FESpace& velocity_space,
    const std::vector<InterfaceQuadSample>& quad) {
  Eigen::VectorXd column = Eigen::VectorXd::Zero(velocity_space.dofs());
  std::array<int, 6> nodes;
  std::array<double, 6> phi;
  for (const auto& s : quad) {
    velocity_space.cell_nodes(s.tri, nodes);
    basis_values(velocity_space.kind, s.bary, phi);
    for (int i = 0; i < velocity_space.nodes_per_cell(); ++i)
      for (int c = 0; c < 2; ++c)
        column[velocity_space.dof(nodes[i], c)] +=
            s.weight * phi[i] * s.normal[c];
  }
  return column;
}

double xfem_basis_value(const ElementClassification& cls,
                        const PolygonalCurve& curve, int tri, const Vec2& p) {
  switch (cls.cls[tri]) {
    case ElemClass::InteriorMinus:
      return 1.0;
    case ElemClass::InteriorPlus:
      return 0.0;
    case ElemClass::Interfacial:
      return point_inside_curve(curve, p) ? 1.0 : 0.0;
  }
  return 0.0;
}

}  // namespace veflow

#include "veflow/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "veflow/errors.hpp"

namespace veflow {

namespace {

// Rebuild the neighbor table and propagate boundary tags through an edge-tag
// map keyed by sorted vertex pairs.
void rebuild_topology(Triangulation& mesh,
                      const std::map<std::pair<int, int>, BoundaryTag>& tags) {
  const int nt = mesh.n_triangles();
  mesh.neighbors.assign(nt, {-1, -1, -1});
  mesh.edge_tags.assign(nt, {BoundaryTag::None, BoundaryTag::None,
                             BoundaryTag::None});
  std::map<std::pair<int, int>, std::pair<int, int>> half;  // edge -> (t, k)
  for (int t = 0; t < nt; ++t) {
    for (int k = 0; k < 3; ++k) {
      const int a = mesh.triangles[t][(k + 1) % 3];
      const int b = mesh.triangles[t][(k + 2) % 3];
      const auto key = std::minmax(a, b);
      auto it = half.find(key);
      if (it == half.end()) {
        half[key] = {t, k};
      } else {
        mesh.neighbors[t][k] = it->second.first;
        mesh.neighbors[it->second.first][it->second.second] = t;
        half.erase(it);
      }
    }
  }
  // Remaining half edges are boundary edges.
  for (const auto& [key, tk] : half) {
    auto it = tags.find(key);
    mesh.edge_tags[tk.first][tk.second] =
        it != tags.end() ? it->second : BoundaryTag::Dirichlet;
  }
}

std::map<std::pair<int, int>, BoundaryTag> collect_boundary_tags(
    const Triangulation& mesh) {
  std::map<std::pair<int, int>, BoundaryTag> tags;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    for (int k = 0; k < 3; ++k) {
      if (mesh.neighbors[t][k] != -1) continue;
      const int a = mesh.triangles[t][(k + 1) % 3];
      const int b = mesh.triangles[t][(k + 2) % 3];
      tags[std::minmax(a, b)] = mesh.edge_tags[t][k];
    }
  }
  return tags;
}

int longest_edge_slot(const Triangulation& mesh, int t) {
  int best = 0;
  double best_len = -1.0;
  for (int k = 0; k < 3; ++k) {
    const Vec2& a = mesh.vertices[mesh.triangles[t][(k + 1) % 3]];
    const Vec2& b = mesh.vertices[mesh.triangles[t][(k + 2) % 3]];
    const double len = (b - a).squaredNorm();
    if (len > best_len + 1e-15 * std::max(1.0, best_len)) {
      best_len = len;
      best = k;
    }
  }
  return best;
}

std::pair<int, int> edge_key(const Triangulation& mesh, int t, int k) {
  return std::minmax(mesh.triangles[t][(k + 1) % 3],
                     mesh.triangles[t][(k + 2) % 3]);
}

// Bounding-box bins over the interface segments for fast triangle queries.
struct SegmentGrid {
  const PolygonalCurve* curve{nullptr};
  Rect box;
  int nx{1}, ny{1};
  double hx{1}, hy{1};
  std::vector<std::vector<int>> bins;

  explicit SegmentGrid(const PolygonalCurve& c) : curve(&c) {
    double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
    for (const Vec2& v : c.vertices) {
      x0 = std::min(x0, v.x());
      y0 = std::min(y0, v.y());
      x1 = std::max(x1, v.x());
      y1 = std::max(y1, v.y());
    }
    const double pad = 1e-9 * std::max(1.0, std::max(x1 - x0, y1 - y0));
    box = {x0 - pad, y0 - pad, x1 + pad, y1 + pad};
    const int n = std::max(1, c.size());
    nx = ny = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(n))));
    hx = box.width() / nx;
    hy = box.height() / ny;
    bins.assign(static_cast<size_t>(nx) * ny, {});
    for (int s = 0; s < c.size(); ++s) {
      const Vec2& a = c.vertices[s];
      const Vec2& b = c.vertices[(s + 1) % c.size()];
      for_cells(std::min(a.x(), b.x()), std::min(a.y(), b.y()),
                std::max(a.x(), b.x()), std::max(a.y(), b.y()),
                [&](int cell) { bins[cell].push_back(s); });
    }
  }

  template <typename F>
  void for_cells(double x0, double y0, double x1, double y1, F&& f) const {
    int i0 = static_cast<int>(std::floor((x0 - box.x0) / hx));
    int i1 = static_cast<int>(std::floor((x1 - box.x0) / hx));
    int j0 = static_cast<int>(std::floor((y0 - box.y0) / hy));
    int j1 = static_cast<int>(std::floor((y1 - box.y0) / hy));
    i0 = std::clamp(i0, 0, nx - 1);
    i1 = std::clamp(i1, 0, nx - 1);
    j0 = std::clamp(j0, 0, ny - 1);
    j1 = std::clamp(j1, 0, ny - 1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) f(j * nx + i);
  }

  // Candidate segments whose bounding boxes overlap the query box.
  std::vector<int> candidates(double x0, double y0, double x1,
                              double y1) const {
    if (x1 < box.x0 || x0 > box.x1 || y1 < box.y0 || y0 > box.y1) return {};
    std::vector<int> out;
    for_cells(x0, y0, x1, y1, [&](int cell) {
      out.insert(out.end(), bins[cell].begin(), bins[cell].end());
    });
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
};

bool triangle_touches_curve(const Triangulation& mesh, int t,
                            const PolygonalCurve& curve,
                            const SegmentGrid& grid) {
  const auto& tri = mesh.triangles[t];
  const Vec2& a = mesh.vertices[tri[0]];
  const Vec2& b = mesh.vertices[tri[1]];
  const Vec2& c = mesh.vertices[tri[2]];
  const double x0 = std::min({a.x(), b.x(), c.x()});
  const double x1 = std::max({a.x(), b.x(), c.x()});
  const double y0 = std::min({a.y(), b.y(), c.y()});
  const double y1 = std::max({a.y(), b.y(), c.y()});
  for (int s : grid.candidates(x0, y0, x1, y1)) {
    const Vec2& s0 = curve.vertices[s];
    const Vec2& s1 = curve.vertices[(s + 1) % curve.size()];
    if (segment_intersects_triangle(s0, s1, a, b, c)) return true;
  }
  return false;
}

}  // namespace

Triangulation uniform_mesh(const Rect& rect, int n_c) {
  if (n_c < 1) throw InvalidRect("uniform_mesh: n_c must be at least 1");
  if (!(rect.width() > 0.0) || !(rect.height() > 0.0))
    throw InvalidRect("uniform_mesh: degenerate rectangle");
  const double h = rect.width() / n_c;
  const double ny_real = rect.height() / h;
  const int ny = static_cast<int>(std::lround(ny_real));
  if (std::abs(ny_real - ny) > 1e-9 || ny < 1)
    throw InvalidRect(
        "uniform_mesh: rectangle height must be a multiple of the cell side");
  const int nx = n_c;

  Triangulation mesh;
  mesh.domain = rect;
  mesh.vertices.reserve(static_cast<size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      mesh.vertices.emplace_back(rect.x0 + i * h, rect.y0 + j * h);

  auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j);
      const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      mesh.triangles.push_back({v00, v10, v11});
      mesh.triangles.push_back({v00, v11, v01});
    }
  }
  mesh.generation.assign(mesh.n_triangles(), 0);
  rebuild_topology(mesh, {});
  return mesh;
}

Triangulation bisect_refine(const Triangulation& mesh,
                            const std::vector<int>& marked) {
  for (int t : marked)
    if (t < 0 || t >= mesh.n_triangles())
      throw Error("bisect_refine: marked id out of range");
  if (marked.empty()) return mesh;

  // Conforming closure on the edge level: whenever any edge of a triangle is
  // split, its longest edge must be split as well. Midpoints then match
  // across neighbors and no hanging nodes remain.
  std::set<std::pair<int, int>> split;
  for (int t : marked) split.insert(edge_key(mesh, t, longest_edge_slot(mesh, t)));
  bool changed = true;
  while (changed) {
    changed = false;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
      bool any = false;
      for (int k = 0; k < 3; ++k)
        if (split.count(edge_key(mesh, t, k))) any = true;
      if (!any) continue;
      const auto longest = edge_key(mesh, t, longest_edge_slot(mesh, t));
      if (!split.count(longest)) {
        split.insert(longest);
        changed = true;
      }
    }
  }

  Triangulation out;
  out.domain = mesh.domain;
  out.vertices = mesh.vertices;
  std::map<std::pair<int, int>, int> midpoint;
  for (const auto& e : split) {
    midpoint[e] = out.n_vertices();
    out.vertices.push_back(0.5 *
                           (mesh.vertices[e.first] + mesh.vertices[e.second]));
  }

  // Carry boundary tags over, including the two halves of each split edge.
  auto tags = collect_boundary_tags(mesh);
  std::map<std::pair<int, int>, BoundaryTag> new_tags;
  for (const auto& [key, tag] : tags) {
    auto it = midpoint.find(key);
    if (it == midpoint.end()) {
      new_tags[key] = tag;
    } else {
      new_tags[std::minmax(key.first, it->second)] = tag;
      new_tags[std::minmax(key.second, it->second)] = tag;
    }
  }

  auto emit = [&out](int a, int b, int c, int gen) {
    out.triangles.push_back({a, b, c});
    out.generation.push_back(gen);
  };

  // Bisect a triangle (a, b, c) across the edge (b, c) if that edge is split;
  // recurse into the children for the remaining split edges.
  auto split_of = [&](int a, int b) {
    auto it = midpoint.find(std::minmax(a, b));
    return it == midpoint.end() ? -1 : it->second;
  };
  std::function<void(int, int, int, int)> subdivide = [&](int a, int b, int c,
                                                          int gen) {
    // The cut edge is chosen as the longest among the split edges of this
    // (sub)triangle; for the first level this is the triangle's longest edge
    // by the closure rule.
    int cut = -1;
    double cut_len = -1.0;
    const std::array<std::array<int, 3>, 3> edges = {
        {{b, c, a}, {c, a, b}, {a, b, c}}};
    for (int i = 0; i < 3; ++i) {
      const auto& e = edges[i];
      if (split_of(e[0], e[1]) == -1) continue;
      const double len = (out.vertices[e[0]] - out.vertices[e[1]]).squaredNorm();
      if (len > cut_len) {
        cut_len = len;
        cut = i;
      }
    }
    if (cut == -1) {
      emit(a, b, c, gen);
      return;
    }
    const auto& e = edges[cut];
    const int m = split_of(e[0], e[1]);
    // Children (apex, first, m) and (apex, m, second) keep the orientation.
    subdivide(e[2], e[0], m, gen + 1);
    subdivide(e[2], m, e[1], gen + 1);
  };

  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    subdivide(tri[0], tri[1], tri[2], mesh.generation[t]);
  }
  rebuild_topology(out, new_tags);
  return out;
}

ElementClassification classify_elements(const Triangulation& mesh,
                                        const PolygonalCurve& gamma) {
  if (curve_self_intersects(gamma))
    throw SelfIntersectingInterface("classify_elements: interface invalid");
  SegmentGrid grid(gamma);
  ElementClassification out;
  out.cls.resize(mesh.n_triangles());
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    if (triangle_touches_curve(mesh, t, gamma, grid)) {
      out.cls[t] = ElemClass::Interfacial;
      continue;
    }
    const Vec2 bc = mesh.barycenter(t);
    // Barycenter riding exactly on the interface keeps the averaged
    // coefficient.
    if (distance_to_curve(gamma, bc) < 1e-12) {
      out.cls[t] = ElemClass::Interfacial;
      continue;
    }
    out.cls[t] = point_inside_curve(gamma, bc) ? ElemClass::InteriorMinus
                                               : ElemClass::InteriorPlus;
  }
  return out;
}

Triangulation adapt_to_interface(const Triangulation& coarse,
                                 const PolygonalCurve& gamma, double h_f) {
  if (!(h_f > 0.0)) throw Error("adapt_to_interface: h_f must be positive");
  const double area_max = h_f * h_f;  // 2 h_f^d / d! for d = 2
  Triangulation mesh = coarse;
  while (true) {
    SegmentGrid grid(gamma);
    std::vector<int> marked;
    std::vector<char> is_marked(mesh.n_triangles(), 0);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
      if (mesh.triangle_area(t) > area_max &&
          triangle_touches_curve(mesh, t, gamma, grid)) {
        marked.push_back(t);
        is_marked[t] = 1;
      }
    }
    if (marked.empty()) return mesh;
    std::vector<int> with_neighbors = marked;
    for (int t : marked)
      for (int k = 0; k < 3; ++k) {
        const int nb = mesh.neighbors[t][k];
        if (nb != -1 && !is_marked[nb]) {
          with_neighbors.push_back(nb);
          is_marked[nb] = 1;
        }
      }
    mesh = bisect_refine(mesh, with_neighbors);
  }
}

PhaseFieldValues phase_field(const ElementClassification& cls, double v_minus,
                             double v_plus) {
  PhaseFieldValues out(cls.size());
  for (int t = 0; t < cls.size(); ++t) {
    switch (cls.cls[t]) {
      case ElemClass::InteriorMinus:
        out[t] = v_minus;
        break;
      case ElemClass::InteriorPlus:
        out[t] = v_plus;
        break;
      case ElemClass::Interfacial:
        out[t] = 0.5 * (v_minus + v_plus);
        break;
    }
  }
  return out;
}

std::pair<bool, std::vector<int>> non_obtuse_check(const Triangulation& mesh) {
  std::vector<int> violating;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      const Vec2 e1 = mesh.vertices[tri[(k + 1) % 3]] - mesh.vertices[tri[k]];
      const Vec2 e2 = mesh.vertices[tri[(k + 2) % 3]] - mesh.vertices[tri[k]];
      const double cos_angle = e1.dot(e2) / (e1.norm() * e2.norm());
      if (cos_angle < -1e-12) {  // angle beyond pi/2
        violating.push_back(t);
        break;
      }
    }
  }
  return {violating.empty(), violating};
}

}  // namespace veflow

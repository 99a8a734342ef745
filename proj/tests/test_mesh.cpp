#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "test_support.hpp"
#include "veflow/curve.hpp"
#include "veflow/mesh.hpp"

using namespace veflow;

namespace {

// Conformity oracle: every edge is shared by at most two triangles and the
// shared edges have identical endpoint pairs (automatic with indexed
// storage); additionally all triangles are positively oriented.
void check_conforming(const Triangulation& mesh) {
  std::map<std::pair<int, int>, int> edge_count;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    REQUIRE(mesh.triangle_area(t) > 0.0);
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k)
      edge_count[std::minmax(tri[(k + 1) % 3], tri[(k + 2) % 3])]++;
  }
  for (const auto& [e, c] : edge_count) REQUIRE(c <= 2);
  // No hanging nodes: no vertex lies strictly inside another triangle's edge.
  for (const auto& [e, c] : edge_count) {
    if (c != 1) continue;  // interior edges cannot hide hanging nodes
    const Vec2& a = mesh.vertices[e.first];
    const Vec2& b = mesh.vertices[e.second];
    for (int v = 0; v < mesh.n_vertices(); ++v) {
      if (v == e.first || v == e.second) continue;
      const double d = dist_point_segment(mesh.vertices[v], a, b);
      if (d < 1e-12) FAIL("hanging node detected on boundary edge");
    }
  }
}

double total_area(const Triangulation& mesh) {
  double area = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) area += mesh.triangle_area(t);
  return area;
}

}  // namespace

TEST_CASE("uniform_mesh basic counts") {
  const Triangulation unit = uniform_mesh({0, 0, 1, 1}, 1);
  CHECK(unit.n_triangles() == 2);
  CHECK(unit.n_vertices() == 4);
  check_conforming(unit);

  const Triangulation tall = uniform_mesh({0, 0, 2, 4}, 20);
  CHECK(tall.n_triangles() == 20 * 40 * 2);
  CHECK(total_area(tall) == doctest::Approx(8.0).epsilon(1e-13));
  check_conforming(tall);

  // Mesh size h_c = 2 / N_c on the square (0,2)^2.
  const Triangulation square = uniform_mesh({0, 0, 2, 2}, 20);
  double h = 0.0;
  for (int t = 0; t < square.n_triangles(); ++t)
    for (int k = 0; k < 3; ++k) {
      const auto& tri = square.triangles[t];
      const double len = (square.vertices[tri[(k + 1) % 3]] -
                          square.vertices[tri[(k + 2) % 3]])
                             .norm();
      h = std::max(h, len);
    }
  CHECK(h == doctest::Approx(0.1 * std::sqrt(2.0)).epsilon(1e-13));

  CHECK_THROWS_AS(uniform_mesh({0, 0, 0, 1}, 4), InvalidRect);
  CHECK_THROWS_AS(uniform_mesh({0, 0, 1, 1}, 0), InvalidRect);
}

TEST_CASE("uniform_mesh boundary tags cover the rectangle boundary") {
  const Triangulation mesh = uniform_mesh({0, 0, 2, 2}, 4);
  int boundary_edges = 0;
  for (int t = 0; t < mesh.n_triangles(); ++t)
    for (int k = 0; k < 3; ++k)
      if (mesh.neighbors[t][k] == -1) {
        ++boundary_edges;
        CHECK(mesh.edge_tags[t][k] == BoundaryTag::Dirichlet);
      }
  CHECK(boundary_edges == 4 * 4);
}

TEST_CASE("bisect_refine no-op and single mark") {
  const Triangulation mesh = uniform_mesh({0, 0, 1, 1}, 1);
  const Triangulation same = bisect_refine(mesh, {});
  CHECK(same.n_triangles() == mesh.n_triangles());

  const Triangulation refined = bisect_refine(mesh, {0});
  CHECK(refined.n_triangles() >= 3);
  check_conforming(refined);
  CHECK(total_area(refined) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("bisect_refine mark-all halves every area") {
  Triangulation mesh = uniform_mesh({0, 0, 1, 1}, 2);
  const int nt = mesh.n_triangles();
  const double max_area_before =
      [&] {
        double m = 0;
        for (int t = 0; t < nt; ++t) m = std::max(m, mesh.triangle_area(t));
        return m;
      }();
  std::vector<int> all(nt);
  std::iota(all.begin(), all.end(), 0);
  const Triangulation refined = bisect_refine(mesh, all);
  CHECK(refined.n_triangles() == 2 * nt);
  check_conforming(refined);
  for (int t = 0; t < refined.n_triangles(); ++t)
    CHECK(refined.triangle_area(t) ==
          doctest::Approx(0.5 * max_area_before).epsilon(1e-12));
}

TEST_CASE("repeated bisection keeps conformity and angle bounds") {
  Triangulation mesh = uniform_mesh({0, 0, 1, 1}, 2);
  auto rng = testsupport::make_rng(7);
  for (int round = 0; round < 6; ++round) {
    std::vector<int> marked;
    std::uniform_int_distribution<int> pick(0, mesh.n_triangles() - 1);
    for (int i = 0; i < std::max(1, mesh.n_triangles() / 4); ++i)
      marked.push_back(pick(rng));
    mesh = bisect_refine(mesh, marked);
    check_conforming(mesh);
  }
  // The structured split family stays right-isoceles, hence non-obtuse with
  // a fixed minimum angle.
  const auto [ok, violating] = non_obtuse_check(mesh);
  CHECK(ok);
  CHECK(violating.empty());
  CHECK(total_area(mesh) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("classify_elements inclusion and locality") {
  const Triangulation mesh = uniform_mesh({0, 0, 2, 2}, 8);

  // A huge circle swallowing the whole mesh.
  const PolygonalCurve big = build_circle({1.0, 1.0}, 10.0, 64);
  const ElementClassification cls_big = classify_elements(mesh, big);
  for (int t = 0; t < mesh.n_triangles(); ++t)
    CHECK(cls_big.cls[t] == ElemClass::InteriorMinus);

  // A tiny circle strictly inside one triangle.
  const Vec2 bc = mesh.barycenter(0);
  const PolygonalCurve small = build_circle(bc, 1e-3, 16);
  const ElementClassification cls_small = classify_elements(mesh, small);
  int interfacial = 0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    if (cls_small.cls[t] == ElemClass::Interfacial)
      ++interfacial;
    else
      CHECK(cls_small.cls[t] == ElemClass::InteriorPlus);
  }
  CHECK(interfacial == 1);
  CHECK(cls_small.cls[0] == ElemClass::Interfacial);
}

TEST_CASE("classify_elements matches brute-force oracle") {
  const Triangulation mesh = uniform_mesh({0, 0, 2, 4}, 20);
  const PolygonalCurve gamma = build_circle({1.0, 0.8}, 0.3, 200);
  const ElementClassification cls = classify_elements(mesh, gamma);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    bool touches = false;
    for (int s = 0; s < gamma.size(); ++s) {
      if (segment_intersects_triangle(
              gamma.vertices[s], gamma.vertices[(s + 1) % gamma.size()],
              mesh.vertices[tri[0]], mesh.vertices[tri[1]],
              mesh.vertices[tri[2]])) {
        touches = true;
        break;
      }
    }
    if (touches) {
      CHECK(cls.cls[t] == ElemClass::Interfacial);
    } else {
      const bool inside = point_inside_curve(gamma, mesh.barycenter(t));
      CHECK(cls.cls[t] ==
            (inside ? ElemClass::InteriorMinus : ElemClass::InteriorPlus));
    }
  }
}

TEST_CASE("classification is pure geometry (stable under reordering)") {
  Triangulation mesh = uniform_mesh({0, 0, 2, 2}, 6);
  const PolygonalCurve gamma = build_circle({1.0, 1.0}, 0.5, 64);
  const ElementClassification before = classify_elements(mesh, gamma);
  Triangulation shuffled = mesh;
  std::reverse(shuffled.triangles.begin(), shuffled.triangles.end());
  std::reverse(shuffled.generation.begin(), shuffled.generation.end());
  // Neighbor/table data must be rebuilt for the reordered copy.
  shuffled = bisect_refine(shuffled, {});
  const ElementClassification after = classify_elements(shuffled, gamma);
  for (int t = 0; t < mesh.n_triangles(); ++t)
    CHECK(before.cls[t] == after.cls[mesh.n_triangles() - 1 - t]);
}

TEST_CASE("adapt_to_interface leaves far meshes alone and refines near") {
  const Triangulation coarse = uniform_mesh({0, 0, 2, 2}, 10);
  const double h_c = 0.2;
  const double h_f = h_c / 4.0;

  const PolygonalCurve far = build_circle({50.0, 50.0}, 0.3, 32);
  const Triangulation unchanged = adapt_to_interface(coarse, far, h_f);
  CHECK(unchanged.n_triangles() == coarse.n_triangles());

  const PolygonalCurve gamma = build_circle({1.0, 1.0}, 0.3, 100);
  const Triangulation fine = adapt_to_interface(coarse, gamma, h_f);
  CHECK(fine.n_triangles() > coarse.n_triangles());
  check_conforming(fine);
  const auto [ok, violating] = non_obtuse_check(fine);
  CHECK(ok);

  // Every element still touching the interface obeys the area bound.
  const ElementClassification cls = classify_elements(fine, gamma);
  for (int t = 0; t < fine.n_triangles(); ++t)
    if (cls.cls[t] == ElemClass::Interfacial)
      CHECK(fine.triangle_area(t) <= h_f * h_f + 1e-15);

  // Replay oracle: re-running the marking loop on the result marks nothing.
  const Triangulation again = adapt_to_interface(fine, gamma, h_f);
  CHECK(again.n_triangles() == fine.n_triangles());
}

TEST_CASE("phase_field values per class") {
  ElementClassification cls;
  cls.cls = {ElemClass::InteriorMinus, ElemClass::InteriorPlus,
             ElemClass::Interfacial};
  const PhaseFieldValues rho = phase_field(cls, 0.1, 1.0);
  CHECK(rho[0] == 0.1);
  CHECK(rho[1] == 1.0);
  CHECK(rho[2] == doctest::Approx(0.55));

  const PhaseFieldValues matched = phase_field(cls, 3.0, 3.0);
  for (int t = 0; t < 3; ++t) CHECK(matched[t] == 3.0);

  const double c0 = 1.0;
  const PhaseFieldValues mu = phase_field(cls, 1.025, 10.25 / (1.0 + c0));
  CHECK(mu[2] == doctest::Approx(3.075).epsilon(1e-13));
}

TEST_CASE("non_obtuse_check detects obtuse triangles") {
  Triangulation mesh;
  mesh.domain = {0, 0, 1, 1};
  mesh.vertices = {{0, 0}, {1, 0}, {0.5, 0.05}};
  mesh.triangles = {{0, 1, 2}};
  mesh.generation = {0};
  mesh.neighbors = {{-1, -1, -1}};
  mesh.edge_tags = {{BoundaryTag::Dirichlet, BoundaryTag::Dirichlet,
                     BoundaryTag::Dirichlet}};
  const auto [ok, violating] = non_obtuse_check(mesh);
  CHECK_FALSE(ok);
  CHECK(violating == std::vector<int>{0});

  const auto [ok2, v2] = non_obtuse_check(uniform_mesh({0, 0, 2, 2}, 5));
  CHECK(ok2);
  CHECK(v2.empty());
}

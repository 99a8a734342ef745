#pragma once

#include <array>

namespace veflow {

struct TriQuadPoint {
  double l0, l1, l2;  // barycentric coordinates
  double weight;      // sums to 1 over the rule
};

// Seven-point rule, exact for polynomials up to degree 5. Covers every bulk
// integrand assembled here (at most P2 x P1' x P2).
inline const std::array<TriQuadPoint, 7>& tri_quadrature_deg5() {
  static const std::array<TriQuadPoint, 7> rule = [] {
    const double a = 0.059715871789770;  // (6 - sqrt(15)) / 21 group
    const double b = 0.470142064105115;
    const double c = 0.797426985353087;  // (6 + sqrt(15)) / 21 group
    const double d = 0.101286507323456;
    const double w1 = 0.225;
    const double w2 = 0.132394152788506;
    const double w3 = 0.125939180544827;
    return std::array<TriQuadPoint, 7>{{
        {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, w1},
        {a, b, b, w2},
        {b, a, b, w2},
        {b, b, a, w2},
        {c, d, d, w3},
        {d, c, d, w3},
        {d, d, c, w3},
    }};
  }();
  return rule;
}

struct GaussPoint1D {
  double t;  // on [0, 1]
  double weight;
};

// Three-point Gauss on [0, 1], exact through degree 5.
inline const std::array<GaussPoint1D, 3>& gauss3_unit() {
  static const std::array<GaussPoint1D, 3> rule = [] {
    const double s = 0.774596669241483377035853079956 / 2.0;
    return std::array<GaussPoint1D, 3>{{
        {0.5 - s, 5.0 / 18.0},
        {0.5, 8.0 / 18.0},
        {0.5 + s, 5.0 / 18.0},
    }};
  }();
  return rule;
}

}  // namespace veflow

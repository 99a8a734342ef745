#pragma once

#include <Eigen/Dense>
#include <array>
#include <random>

#include "veflow/symmat.hpp"

namespace veflow::testsupport {

// All randomized tests draw from explicitly seeded generators so reruns are
// reproducible bit for bit.
inline std::mt19937 make_rng(unsigned seed) { return std::mt19937(seed); }

inline SymMat2 random_symmetric(std::mt19937& rng, double scale = 2.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return SymMat2{u(rng), u(rng), u(rng)};
}

inline SymMat2 random_spd(std::mt19937& rng, double eig_min = 0.05,
                          double eig_max = 5.0) {
  std::uniform_real_distribution<double> ue(eig_min, eig_max);
  std::uniform_real_distribution<double> ut(0.0, 3.14159265358979323846);
  const double l1 = ue(rng), l2 = ue(rng), t = ut(rng);
  const double c = std::cos(t), s = std::sin(t);
  return SymMat2{c * c * l1 + s * s * l2, c * s * (l1 - l2),
                 s * s * l1 + c * c * l2};
}

// Random non-degenerate triangle with a minimum-area floor.
inline std::array<Eigen::Vector2d, 3> random_triangle(std::mt19937& rng,
                                                      double min_area = 0.05) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  while (true) {
    std::array<Eigen::Vector2d, 3> p = {Eigen::Vector2d(u(rng), u(rng)),
                                        Eigen::Vector2d(u(rng), u(rng)),
                                        Eigen::Vector2d(u(rng), u(rng))};
    const double twice_area = (p[1] - p[0]).x() * (p[2] - p[0]).y() -
                              (p[1] - p[0]).y() * (p[2] - p[0]).x();
    if (twice_area > 2.0 * min_area) return p;
    if (twice_area < -2.0 * min_area) {
      std::swap(p[1], p[2]);
      return p;
    }
  }
}

// Random triangle whose angles are all at most pi/2 (rejection sampled).
inline std::array<Eigen::Vector2d, 3> random_non_obtuse_triangle(
    std::mt19937& rng, double min_area = 0.02) {
  while (true) {
    auto p = random_triangle(rng, min_area);
    bool ok = true;
    for (int i = 0; i < 3; ++i) {
      const Eigen::Vector2d e1 = p[(i + 1) % 3] - p[i];
      const Eigen::Vector2d e2 = p[(i + 2) % 3] - p[i];
      if (e1.dot(e2) < 0.0) {
        ok = false;
        break;
      }
    }
    if (ok) return p;
  }
}

}  // namespace veflow::testsupport

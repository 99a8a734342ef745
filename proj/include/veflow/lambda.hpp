#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>

#include "veflow/geometry.hpp"
#include "veflow/symmat.hpp"

namespace veflow {

// Affine reference map x = p0 + A xhat taking the unit reference triangle
// (origin and the two standard basis vectors) to an element, vertex by
// vertex.
struct RefMapping {
  Eigen::Matrix2d A;
  Vec2 p0;

  static RefMapping from_vertices(const Vec2& v0, const Vec2& v1,
                                  const Vec2& v2) {
    RefMapping m;
    m.p0 = v0;
    m.A.col(0) = v1 - v0;
    m.A.col(1) = v2 - v0;
    return m;
  }
};

// The element-constant fourth-order transport tensor: one symmetric 2x2
// block per index pair (i, j). Approximates delta_{ij} B and makes the
// discrete chain rule for tr ln B exact.
struct LambdaElement {
  std::array<std::array<SymMat2, 2>, 2> block;
  const SymMat2& operator()(int i, int j) const { return block[i][j]; }
};

// Secant coefficient of the convex combination in Lambda-hat; lies in [0, 1].
// With delta the inputs pass through beta_delta first.
double lambda_coefficient(const SymMat2& b0, const SymMat2& bi,
                          std::optional<double> delta = std::nullopt);

// Lambda-hat_i: equals B_i when B_i = B_0 (entrywise within
// 1e-14 max(1, |B_0|)), otherwise B_i + lambda_i (B_0 - B_i). The
// regularized variant applies beta_delta to the nodal values first and
// routes coinciding beta images through the equal branch.
SymMat2 lambda_hat(const SymMat2& b0, const SymMat2& bi,
                   std::optional<double> delta = std::nullopt);

// Lambda_{i,j}|_K = sum_m [(A^T)^{-1}]_{i,m} Lambda-hat_m [A^T]_{m,j}.
LambdaElement assemble_lambda(const std::array<SymMat2, 3>& b_nodal,
                              const RefMapping& mapping,
                              std::optional<double> delta = std::nullopt);

// Both sides of the per-element chain-rule identity evaluated on the P1
// interpolants; returns the maximum relative discrepancy over the spatial
// index.
double verify_chain_rule(const std::array<SymMat2, 3>& b_nodal,
                         const RefMapping& mapping,
                         std::optional<double> delta = std::nullopt);

}  // namespace veflow

#include "veflow/lambda.hpp"

#include <cmath>

#include "veflow/errors.hpp"

namespace veflow {

namespace {

struct NodePair {
  SymMat2 b0, bi;        // effective values (beta-regularized if requested)
  SymMat2 inv0, invi;    // their inverses
  double trlog_inv0, trlog_invi;
  bool equal;            // routed through the equal branch
};

NodePair prepare(const SymMat2& b0_raw, const SymMat2& bi_raw,
                 std::optional<double> delta) {
  NodePair p;
  if (delta) {
    p.b0 = beta_delta(b0_raw, *delta);
    p.bi = beta_delta(bi_raw, *delta);
  } else {
    if (!is_positive_definite(b0_raw) || !is_positive_definite(bi_raw))
      throw NotPositiveDefinite(
          "lambda_hat: nodal tensor not positive definite");
    p.b0 = b0_raw;
    p.bi = bi_raw;
  }
  const double tol =
      1e-14 * std::max(1.0, frobenius_norm(p.b0));
  p.equal = std::abs(p.bi.a11 - p.b0.a11) <= tol &&
            std::abs(p.bi.a12 - p.b0.a12) <= tol &&
            std::abs(p.bi.a22 - p.b0.a22) <= tol;
  if (!p.equal) {
    p.inv0 = inv_sym(p.b0);
    p.invi = inv_sym(p.bi);
    p.trlog_inv0 = -trace_log(p.b0);
    p.trlog_invi = -trace_log(p.bi);
  }
  return p;
}

double coefficient(const NodePair& p) {
  // Secant of the strictly convex map -tr ln on positive definite matrices;
  // the denominator is positive for distinct inputs.
  const SymMat2 dinv = p.inv0 - p.invi;  // -B_i^{-1} + B_0^{-1}
  const double denom = ddot(p.bi - p.b0, dinv);
  const double numer = p.trlog_invi - p.trlog_inv0 + ddot(p.bi, dinv);
  return numer / denom;
}

}  // namespace

double lambda_coefficient(const SymMat2& b0, const SymMat2& bi,
                          std::optional<double> delta) {
  const NodePair p = prepare(b0, bi, delta);
  if (p.equal) return 0.0;
  return coefficient(p);
}

SymMat2 lambda_hat(const SymMat2& b0, const SymMat2& bi,
                   std::optional<double> delta) {
  const NodePair p = prepare(b0, bi, delta);
  if (p.equal) return p.bi;
  const double lam = coefficient(p);
  return p.bi + lam * (p.b0 - p.bi);
}

LambdaElement assemble_lambda(const std::array<SymMat2, 3>& b_nodal,
                              const RefMapping& mapping,
                              std::optional<double> delta) {
  const double det = mapping.A.determinant();
  if (det == 0.0) throw Error("assemble_lambda: singular reference mapping");
  const std::array<SymMat2, 2> hats = {lambda_hat(b_nodal[0], b_nodal[1], delta),
                                       lambda_hat(b_nodal[0], b_nodal[2], delta)};
  const Eigen::Matrix2d at = mapping.A.transpose();
  const Eigen::Matrix2d at_inv = at.inverse();
  LambdaElement out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      SymMat2 sum = SymMat2::zero();
      for (int m = 0; m < 2; ++m) sum += (at_inv(i, m) * at(m, j)) * hats[m];
      out.block[i][j] = sum;
    }
  return out;
}

double verify_chain_rule(const std::array<SymMat2, 3>& b_nodal,
                         const RefMapping& mapping,
                         std::optional<double> delta) {
  const LambdaElement lambda = assemble_lambda(b_nodal, mapping, delta);

  // Hat gradients of the element (vertex v0 = p0, v1, v2 per the mapping).
  const Eigen::Matrix2d inv = mapping.A.inverse();
  std::array<Vec2, 3> grad;
  grad[1] = inv.row(0);
  grad[2] = inv.row(1);
  grad[0] = -grad[1] - grad[2];

  std::array<SymMat2, 3> cinv;    // nodal values of (beta_delta(B))^{-1}
  std::array<double, 3> trlog{};  // nodal values of tr ln of that inverse
  for (int v = 0; v < 3; ++v) {
    const SymMat2 eff =
        delta ? beta_delta(b_nodal[v], *delta) : b_nodal[v];
    cinv[v] = inv_sym(eff);
    trlog[v] = -trace_log(eff);
  }

  double max_abs = 0.0, scale = 1.0;
  for (int i = 0; i < 2; ++i) {
    double lhs = 0.0;
    for (int j = 0; j < 2; ++j) {
      SymMat2 dj = SymMat2::zero();
      for (int v = 0; v < 3; ++v) dj += grad[v][j] * cinv[v];
      lhs += ddot(lambda(i, j), dj);
    }
    double rhs = 0.0;
    for (int v = 0; v < 3; ++v) rhs += trlog[v] * grad[v][i];
    max_abs = std::max(max_abs, std::abs(lhs - rhs));
    scale = std::max({scale, std::abs(lhs), std::abs(rhs)});
  }
  return max_abs / scale;
}

}  // namespace veflow

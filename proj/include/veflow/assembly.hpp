#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <memory>
#include <optional>
#include <vector>

#include "veflow/fem.hpp"
#include "veflow/lambda.hpp"

namespace veflow {

struct SparseSystem {
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd rhs;
  int n_u{0};      // velocity dofs
  int n_p{0};      // pressure dofs including the enrichment
  int n_total{0};  // full system size (velocity + pressure + multiplier)
};

// Everything fixed within one time step and shared by the fixed-point
// sweeps: spaces, transferred previous-time fields, phase coefficients,
// forcing, and the interface quadrature.
struct SweepState {
  const Triangulation* mesh{nullptr};
  const FESpace* uspace{nullptr};
  const PressureSpace* pspace{nullptr};
  const FESpace* bspace{nullptr};
  const PolygonalCurve* curve{nullptr};

  Eigen::VectorXd u_old;  // nodal transfer of the previous velocity
  FEFunction b_old;       // nodal transfer of the previous tensor

  PhaseFieldValues rho, rho_old, mu, lambda_relax;
  PhaseFieldValues g_elem;  // per-element shear modulus (variable mode)
  bool variable_g{false};
  double g_shear{1.0};
  bool solve_b{true};  // false drops the tensor block (no elastic stresses)

  double gamma{10.0}, alpha{1e-2}, dt{1e-4};
  Vec2 f1{0, 0}, f2{0, 0};

  std::vector<InterfaceQuadSample> iq;

  double g_on(int element) const {
    return variable_g ? g_elem[element] : g_shear;
  }
};

// Interface operators of the curvature/evolution subsystem on the current
// interface, with the response maps of the Schur elimination: the pair
// (X, kappa) as an affine function of the velocity flux.
struct InterfaceOperators {
  int m{0};                        // interface vertices
  Eigen::SparseMatrix<double> N;   // 2m x m lumped normal coupling
  Eigen::SparseMatrix<double> A;   // 2m x 2m surface stiffness
  Eigen::SparseMatrix<double> Mu;  // m x n_u exact flux coupling
  Eigen::VectorXd kappa0;          // kappa response to u = 0
  Eigen::VectorXd X0;              // vertex positions response to u = 0
  Eigen::MatrixXd Zk;              // m x m: kappa = kappa0 + dt Zk Mu u
  Eigen::MatrixXd Zx;              // 2m x m: X = X0 + dt Zx Mu u
  double dt{0};

  Eigen::VectorXd kappa_of(const Eigen::VectorXd& u) const {
    return kappa0 + dt * (Zk * (Mu * u));
  }
  Eigen::VectorXd positions_of(const Eigen::VectorXd& u) const {
    return X0 + dt * (Zx * (Mu * u));
  }
};

// Builds the subsystem, factorizes it and extracts the response maps.
// Throws SpanDeficient when the vertex normals do not span the plane.
InterfaceOperators assemble_interface_schur(const PolygonalCurve& curve,
                                            const FESpace& uspace,
                                            const std::vector<InterfaceQuadSample>& iq,
                                            double dt);

// Step-constant parts of the Navier-Stokes sweep: matrix blocks without the
// Schur term and without boundary constraints, plus the constant loads.
// Layout: [velocity][P1][P0][xfem][mean multiplier].
struct NsCore {
  Eigen::SparseMatrix<double> matrix;  // equation form: matrix * x + G-load
                                       // - gamma C kappa - load = 0
  Eigen::VectorXd load;                // time history + body forces
  Eigen::SparseMatrix<double> C;       // n_u x m, transpose of Mu
  int n_u{0}, n_p{0}, n_total{0};
};

NsCore build_ns_core(const SweepState& state, const InterfaceOperators& ops);

// Explicit elastic load G (B - I) : grad w on the velocity rows.
Eigen::VectorXd elastic_load(const SweepState& state, const FEFunction& b,
                             int n_total);

// One linear Navier-Stokes sweep over (u, p): the interface unknowns enter
// through the Schur response, the elastic load is lagged, and Dirichlet
// constraints are eliminated symmetrically.
SparseSystem assemble_ns_sweep(const SweepState& state,
                               const InterfaceOperators& ops,
                               const NsCore& core, const FEFunction& b_lag);

// One linear viscoelastic sweep over B with lagged velocity and transport
// tensor. The system matrix (lumped time/relaxation plus diffusion) is
// symmetric positive definite.
SparseSystem assemble_visco_sweep(const SweepState& state,
                                  const Eigen::VectorXd& u_lag,
                                  const FEFunction& b_lag);

// Max-norm residual of the coupled nonlinear system at a candidate state;
// nonlinear terms are evaluated at the candidate itself. Dirichlet velocity
// rows are excluded (test functions vanish there).
double full_residual(const SweepState& state, const InterfaceOperators& ops,
                     const NsCore& core, const Eigen::VectorXd& u,
                     const Eigen::VectorXd& p_full, const FEFunction& b,
                     const Eigen::VectorXd& positions,
                     const Eigen::VectorXd& kappa);

// Both sides of the tested transport identity: the assembled transport term
// contracted with I1[B^{-1}] and the pairing of u with the gradient of
// I1[tr ln B^{-1}].
std::pair<double, double> transport_chain_pair(const SweepState& state,
                                               const Eigen::VectorXd& u,
                                               const FEFunction& b);

// Per-element terms of the diffusion/log inequality on non-obtuse elements:
// lhs = -|K| grad B : grad I1[beta_delta(B)^{-1}],
// rhs = (1/2) |K| |grad I1[tr ln beta_delta(B)]|^2.
std::pair<double, double> log_diffusion_terms(
    const std::array<Vec2, 3>& vertices, const std::array<SymMat2, 3>& b_nodal,
    double delta);

}  // namespace veflow

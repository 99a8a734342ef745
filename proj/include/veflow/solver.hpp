#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <vector>

#include "veflow/assembly.hpp"
#include "veflow/config.hpp"
#include "veflow/diagnostics.hpp"
#include "veflow/fem.hpp"

namespace veflow {

// Everything tied to one step's bulk mesh: the adapted triangulation, the
// spaces, the interface operators of Gamma^n and the cached step-constant
// assembly blocks. Heap-allocated and pinned, since the members point into
// each other.
struct DiscreteStep {
  Triangulation mesh;
  ElementClassification cls;
  FESpace uspace, bspace;
  PressureSpace pspace;
  std::unique_ptr<PointLocator> locator;
  PolygonalCurve curve;  // the interface this step was built around
  SweepState sweep;
  InterfaceOperators ops;
  NsCore core;
  bool solve_b{true};

  DiscreteStep() = default;
  DiscreteStep(const DiscreteStep&) = delete;
  DiscreteStep& operator=(const DiscreteStep&) = delete;
};

// The unknowns after a step: coefficient vectors over the step's spaces plus
// the evolved interface.
struct StateFields {
  std::shared_ptr<DiscreteStep> step;
  Eigen::VectorXd u;       // velocity coefficients
  Eigen::VectorXd p;       // pressure + mean-multiplier coefficients
  FEFunction b;            // elastic tensor field on step->bspace
  PolygonalCurve curve;    // evolved interface Gamma^{n+1}
  Eigen::VectorXd kappa;   // discrete curvature on Gamma^n vertices
  PhaseFieldValues rho;    // density field of this step (next step's history)
  double time{0};
  int fp_iters{0};
};

// Sparse direct solve with a multiply-back accuracy check.
Eigen::VectorXd linear_solve(const SparseSystem& system);

struct FixedPointResult {
  Eigen::VectorXd u, p, kappa, positions;
  FEFunction b;
  int iters{0};
  double residual{0};
};

// Alternate the Navier-Stokes sweep and the viscoelastic sweep until the
// residual of the coupled system drops below tol. Throws NoConvergence after
// max_fp_iters and NotPositiveDefinite if an iterate's tensor leaves the
// positive definite cone.
FixedPointResult fixed_point_solve(DiscreteStep& step, const RunConfig& cfg);

// Build the discrete step for an interface: adapted mesh, spaces, transfers
// from the previous state (absent for the initial step), interface operators
// and cached blocks.
std::shared_ptr<DiscreteStep> build_step(const RunConfig& cfg,
                                         const Triangulation& coarse,
                                         const PolygonalCurve& curve,
                                         const StateFields* prev);

StateFields initial_state(const RunConfig& cfg, const Triangulation& coarse);

// One time step: interface refinement, mesh rebuild, transfer, fixed-point
// solve, interface update and diagnostics.
StateFields advance_step(const StateFields& prev, const RunConfig& cfg,
                         const Triangulation& coarse, double vol_max,
                         double initial_area, DiagnosticsRow* row_out);

struct RunResult {
  std::vector<DiagnosticsRow> series;
  StateFields final_state;
};

// Full time loop; the snapshot callback fires at step 0, every cadence
// steps, and at the final step.
RunResult run_simulation(
    const RunConfig& cfg,
    const std::function<void(int, const StateFields&)>& on_snapshot = {});

}  // namespace veflow

#include "veflow/solver.hpp"

#include <Eigen/SparseLU>
#include <cmath>

#include "veflow/errors.hpp"

namespace veflow {

Eigen::VectorXd linear_solve(const SparseSystem& system) {
  if (system.A.rows() != system.A.cols() ||
      system.A.rows() != system.rhs.size())
    throw SingularSystem("linear_solve: inconsistent system dimensions");
  Eigen::SparseMatrix<double> A = system.A;
  A.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success)
    throw SingularSystem("linear_solve: factorization failed");
  const Eigen::VectorXd x = lu.solve(system.rhs);
  const double rhs_scale = std::max(1.0, system.rhs.cwiseAbs().maxCoeff());
  const double residual = (A * x - system.rhs).cwiseAbs().maxCoeff();
  if (!x.allFinite() || residual > 1e-10 * rhs_scale)
    throw SingularSystem("linear_solve: solution accuracy check failed");
  return x;
}

FixedPointResult fixed_point_solve(DiscreteStep& step, const RunConfig& cfg) {
  const SweepState& sweep = step.sweep;
  FixedPointResult out;
  Eigen::VectorXd u_lag = sweep.u_old;
  FEFunction b_lag = sweep.b_old;

  for (int iter = 1; iter <= cfg.max_fp_iters; ++iter) {
    const SparseSystem ns = assemble_ns_sweep(sweep, step.ops, step.core, b_lag);
    const Eigen::VectorXd x = linear_solve(ns);
    out.u = x.head(step.core.n_u);
    out.p = x.tail(step.core.n_total - step.core.n_u);

    if (step.solve_b) {
      const SparseSystem visco = assemble_visco_sweep(
          sweep, cfg.gauss_seidel ? out.u : u_lag, b_lag);
      out.b = FEFunction(*sweep.bspace);
      out.b.coeffs = linear_solve(visco);
      if (min_nodal_eigenvalue(out.b) <= 0.0)
        throw NotPositiveDefinite(
            "fixed_point_solve: tensor iterate lost positive definiteness");
    } else {
      out.b = sweep.b_old;
    }

    out.kappa = step.ops.kappa_of(out.u);
    out.positions = step.ops.positions_of(out.u);
    out.iters = iter;
    out.residual = full_residual(sweep, step.ops, step.core, out.u, out.p,
                                 out.b, out.positions, out.kappa);
    if (out.residual <= cfg.tol) return out;
    u_lag = out.u;
    b_lag = out.b;
  }
  throw NoConvergence("fixed_point_solve: no convergence after " +
                      std::to_string(cfg.max_fp_iters) +
                      " sweeps, residual " + std::to_string(out.residual));
}

namespace {

PolygonalCurve initial_curve(const RunConfig& cfg) {
  const auto& ii = cfg.interface0;
  return build_polygon(ii.shape == InterfaceInit::Shape::Circle
                           ? CurvePreset::Circle
                           : CurvePreset::Ellipse,
                       ii.center, ii.axis_a, ii.axis_b, ii.elements);
}

void check_inside_domain(const PolygonalCurve& curve, const Rect& domain) {
  for (const Vec2& v : curve.vertices)
    if (!domain.contains(v, 1e-12))
      throw Error("interface vertex left the computational domain");
}

}  // namespace

std::shared_ptr<DiscreteStep> build_step(const RunConfig& cfg,
                                         const Triangulation& coarse,
                                         const PolygonalCurve& curve,
                                         const StateFields* prev) {
  check_inside_domain(curve, cfg.domain);
  auto step = std::make_shared<DiscreteStep>();
  step->curve = curve;
  step->mesh = adapt_to_interface(coarse, curve, cfg.h_f());
  step->cls = classify_elements(step->mesh, curve);
  step->uspace = build_space(step->mesh, SpaceKind::P2, ValueRank::Vector2);
  step->bspace = build_space(step->mesh, SpaceKind::P1, ValueRank::SymTensor2);
  step->pspace = build_pressure_space(step->mesh, cfg.pressure_p0);
  if (cfg.xfem) step->pspace = xfem_enrich(step->pspace, step->cls);
  step->locator = std::make_unique<PointLocator>(step->mesh);

  SweepState& sw = step->sweep;
  sw.mesh = &step->mesh;
  sw.uspace = &step->uspace;
  sw.pspace = &step->pspace;
  sw.bspace = &step->bspace;
  sw.curve = &step->curve;
  sw.dt = cfg.dt;
  sw.gamma = cfg.params.gamma;
  sw.alpha = cfg.params.alpha;
  sw.f1 = cfg.params.f1;
  sw.f2 = cfg.params.f2;
  sw.variable_g = cfg.variable_g;
  sw.g_shear = cfg.variable_g ? 0.0 : cfg.params.g_shear;

  sw.rho = phase_field(step->cls, cfg.params.rho_minus, cfg.params.rho_plus);
  sw.mu = phase_field(step->cls, cfg.params.mu_minus, cfg.params.mu_plus);
  sw.lambda_relax =
      phase_field(step->cls, cfg.params.lambda_minus, cfg.params.lambda_plus);
  if (cfg.variable_g)
    sw.g_elem = phase_field(step->cls, cfg.params.g_minus, cfg.params.g_plus);
  step->solve_b = cfg.variable_g
                      ? (cfg.params.g_minus > 0.0 || cfg.params.g_plus > 0.0)
                      : (cfg.params.g_shear > 0.0);
  sw.solve_b = step->solve_b;

  // Transfers from the previous state: nodal interpolation for the velocity
  // and tensor, element means for the lagged density.
  if (prev != nullptr) {
    const FESpace& pu = prev->step->uspace;
    FEFunction prev_u;
    prev_u.space = &pu;
    prev_u.coeffs = prev->u;
    const PointLocator& ploc = *prev->step->locator;
    sw.u_old = interpolate_vector(step->uspace,
                                  [&](const Vec2& x) {
                                    const auto [t, bary] = ploc.locate(x);
                                    return prev_u.value_vector(t, bary);
                                  })
                   .coeffs;
    sw.b_old = interpolate_tensor(step->bspace, [&](const Vec2& x) {
      const auto [t, bary] = ploc.locate(x);
      return prev->b.value_tensor(t, bary);
    });
    sw.rho_old.resize(step->mesh.n_triangles());
    for (int t = 0; t < step->mesh.n_triangles(); ++t) {
      const auto& tri = step->mesh.triangles[t];
      double mean = 0.0;
      for (const auto& q : tri_quadrature_deg5()) {
        const Vec2 x = q.l0 * step->mesh.vertices[tri[0]] +
                       q.l1 * step->mesh.vertices[tri[1]] +
                       q.l2 * step->mesh.vertices[tri[2]];
        const auto [pt, bary] = ploc.locate(x);
        (void)bary;
        mean += q.weight * prev->rho[pt];
      }
      sw.rho_old[t] = mean;
    }
  } else {
    sw.u_old = Eigen::VectorXd::Zero(step->uspace.dofs());
    sw.b_old = interpolate_tensor(
        step->bspace, [](const Vec2&) { return SymMat2::identity(); });
    sw.rho_old = sw.rho;
  }

  sw.iq = interface_coupling_eval(step->mesh, *step->locator, curve);
  step->ops =
      assemble_interface_schur(curve, step->uspace, sw.iq, cfg.dt);
  step->core = build_ns_core(sw, step->ops);
  return step;
}

StateFields initial_state(const RunConfig& cfg, const Triangulation& coarse) {
  StateFields state;
  state.curve = initial_curve(cfg);
  state.step = build_step(cfg, coarse, state.curve, nullptr);
  state.u = Eigen::VectorXd::Zero(state.step->uspace.dofs());
  state.p = Eigen::VectorXd::Zero(state.step->core.n_total -
                                  state.step->core.n_u);
  state.b = state.step->sweep.b_old;
  state.kappa = Eigen::VectorXd::Zero(state.curve.size());
  state.rho = state.step->sweep.rho;
  state.time = 0.0;
  return state;
}

StateFields advance_step(const StateFields& prev, const RunConfig& cfg,
                         const Triangulation& coarse, double vol_max,
                         double initial_area, DiagnosticsRow* row_out) {
  const PolygonalCurve gamma_n = refine_long_elements(prev.curve, vol_max);
  auto step = build_step(cfg, coarse, gamma_n, &prev);

  const double length_old = polygon_length(gamma_n);
  FixedPointResult solve = fixed_point_solve(*step, cfg);

  StateFields next;
  next.step = step;
  next.u = solve.u;
  next.p = solve.p;
  next.b = solve.b;
  next.kappa = solve.kappa;
  next.rho = step->sweep.rho;
  next.time = prev.time + cfg.dt;
  next.fp_iters = solve.iters;

  next.curve.vertices.resize(gamma_n.size());
  for (int k = 0; k < gamma_n.size(); ++k)
    next.curve.vertices[k] =
        Vec2(solve.positions[2 * k], solve.positions[2 * k + 1]);
  next.curve.normals = element_normals(next.curve);
  if (curve_self_intersects(next.curve))
    throw SelfIntersectingInterface(
        "advance_step: evolved interface self-intersects at t = " +
        std::to_string(next.time));
  check_inside_domain(next.curve, cfg.domain);

  if (row_out != nullptr) {
    const double length_new = polygon_length(next.curve);
    const EnergyReport energy =
        energy_report(step->sweep, next.u, next.b, length_new);
    DiagnosticsRow row;
    row.t = next.time;
    row.e_kin = energy.kinetic;
    row.e_el = energy.elastic;
    row.e_int = energy.interfacial;
    row.e_total = energy.total();
    row.dissipation = dissipation_increment(step->sweep, next.u, next.b,
                                            length_new, length_old);
    const BubbleMetrics metrics =
        bubble_metrics(step->sweep, step->cls, next.u, cfg.params.rho_minus,
                       initial_area);
    row.v_c = metrics.v_c;
    row.y_c = metrics.y_c;
    row.circ = metrics.circ;
    // Volume loss against the initial enclosed area, from the evolved curve.
    row.vol_loss = (initial_area - polygon_area(next.curve)) / initial_area;
    row.r = quality_ratio(next.curve);
    row.fp_iters = solve.iters;
    row.min_eig_b = min_nodal_eigenvalue(next.b);
    *row_out = row;
  }
  return next;
}

RunResult run_simulation(
    const RunConfig& cfg,
    const std::function<void(int, const StateFields&)>& on_snapshot) {
  const Triangulation coarse = uniform_mesh(cfg.domain, cfg.n_c);
  RunResult result;
  StateFields state = initial_state(cfg, coarse);

  const PolygonalCurve& gamma0 = state.curve;
  double vol_max = 0.0;
  for (int k = 0; k < gamma0.size(); ++k)
    vol_max = std::max(vol_max, gamma0.segment_length(k));
  const double initial_area = polygon_area(gamma0);

  const int n_steps = cfg.n_steps();
  if (on_snapshot) on_snapshot(0, state);
  for (int n = 0; n < n_steps; ++n) {
    DiagnosticsRow row;
    state = advance_step(state, cfg, coarse, vol_max, initial_area, &row);
    result.series.push_back(row);
    const int idx = n + 1;
    if (on_snapshot &&
        (idx % std::max(1, cfg.snapshot_cadence) == 0 || idx == n_steps))
      on_snapshot(idx, state);
  }
  result.final_state = std::move(state);
  return result;
}

}  // namespace veflow

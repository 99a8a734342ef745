#include "veflow/diagnostics.hpp"

#include <cmath>

#include "veflow/quadrature.hpp"

namespace veflow {

namespace {
constexpr double kPi = 3.14159265358979323846;

double kinetic_energy(const SweepState& state, const PhaseFieldValues& rho,
                      const Eigen::VectorXd& u) {
  const Triangulation& mesh = *state.mesh;
  FEFunction u_fn;
  u_fn.space = state.uspace;
  u_fn.coeffs = u;
  double sum = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const double area = mesh.triangle_area(t);
    for (const auto& q : tri_quadrature_deg5()) {
      const std::array<double, 3> bary = {q.l0, q.l1, q.l2};
      sum += area * q.weight * rho[t] *
             u_fn.value_vector(t, bary).squaredNorm();
    }
  }
  return 0.5 * sum;
}

}  // namespace

double elastic_energy_lumped(const SweepState& state, const FEFunction& b) {
  const Triangulation& mesh = *state.mesh;
  double sum = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const double g = state.g_on(t);
    if (g == 0.0) continue;
    const double area = mesh.triangle_area(t);
    const auto& tri = mesh.triangles[t];
    for (int v = 0; v < 3; ++v)
      sum += area / 3.0 *
             elastic_energy_density(b.node_tensor(tri[v]), g);
  }
  return sum;
}

EnergyReport energy_report(const SweepState& state, const Eigen::VectorXd& u,
                           const FEFunction& b, double interface_length) {
  EnergyReport report;
  report.kinetic = kinetic_energy(state, state.rho, u);
  report.elastic = elastic_energy_lumped(state, b);
  report.interfacial = state.gamma * interface_length;
  return report;
}

double dissipation_increment(const SweepState& state,
                             const Eigen::VectorXd& u_new,
                             const FEFunction& b_new, double length_new,
                             double length_old) {
  const double e_new = kinetic_energy(state, state.rho, u_new) +
                       elastic_energy_lumped(state, b_new) +
                       state.gamma * length_new;
  const double e_old = kinetic_energy(state, state.rho_old, state.u_old) +
                       elastic_energy_lumped(state, state.b_old) +
                       state.gamma * length_old;

  // Work of the body forces over the step.
  const Triangulation& mesh = *state.mesh;
  FEFunction u_fn;
  u_fn.space = state.uspace;
  u_fn.coeffs = u_new;
  double forcing = 0.0;
  if (state.f1.squaredNorm() + state.f2.squaredNorm() > 0.0) {
    for (int t = 0; t < mesh.n_triangles(); ++t) {
      const double area = mesh.triangle_area(t);
      const Vec2 f = state.rho[t] * state.f1 + state.f2;
      for (const auto& q : tri_quadrature_deg5()) {
        const std::array<double, 3> bary = {q.l0, q.l1, q.l2};
        forcing += area * q.weight * f.dot(u_fn.value_vector(t, bary));
      }
    }
  }
  return -(e_new - e_old - state.dt * forcing);
}

BubbleMetrics bubble_metrics(const SweepState& state,
                             const ElementClassification& cls,
                             const Eigen::VectorXd& u, double rho_minus,
                             double initial_area) {
  BubbleMetrics out;
  const PhaseFieldValues rho_inner = phase_field(cls, rho_minus, 0.0);

  const Triangulation& mesh = *state.mesh;
  FEFunction u_fn;
  u_fn.space = state.uspace;
  u_fn.coeffs = u;
  double momentum = 0.0, mass = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    if (rho_inner[t] == 0.0) continue;
    const double area = mesh.triangle_area(t);
    mass += area * rho_inner[t];
    for (const auto& q : tri_quadrature_deg5()) {
      const std::array<double, 3> bary = {q.l0, q.l1, q.l2};
      momentum += area * q.weight * rho_inner[t] *
                  u_fn.value_vector(t, bary).y();
    }
  }
  out.v_c = mass > 0.0 ? momentum / mass : 0.0;

  const double area = polygon_area(*state.curve);
  const double length = polygon_length(*state.curve);
  out.y_c = polygon_moment_y(*state.curve) / area;
  out.circ = 2.0 * std::sqrt(kPi * area) / length;
  out.vol_loss = (initial_area - area) / initial_area;
  out.r = quality_ratio(*state.curve);
  return out;
}

double min_nodal_eigenvalue(const FEFunction& b) {
  double m = 1e300;
  for (int n = 0; n < b.space->n_scalar_nodes(); ++n)
    m = std::min(m, min_eigenvalue(b.node_tensor(n)));
  return m;
}

}  // namespace veflow

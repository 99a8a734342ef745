#pragma once

#include <Eigen/Dense>

#include "veflow/assembly.hpp"
#include "veflow/curve.hpp"
#include "veflow/fem.hpp"
#include "veflow/mesh.hpp"

namespace veflow {

// One row of the per-step benchmark series. Column order is fixed:
// t, E_kin, E_el, E_int, E_total, D, V_c, y_c, circ, vol_loss, r, fp_iters,
// min_eig_B.
struct DiagnosticsRow {
  double t{0};
  double e_kin{0}, e_el{0}, e_int{0}, e_total{0};
  double dissipation{0};
  double v_c{0}, y_c{0}, circ{0}, vol_loss{0}, r{1};
  int fp_iters{0};
  double min_eig_b{1};
};

struct EnergyReport {
  double kinetic{0}, elastic{0}, interfacial{0};
  double total() const { return kinetic + elastic + interfacial; }
};

// Kinetic energy (exact quadrature), mass-lumped elastic energy (per-element
// shear modulus in variable mode) and gamma-weighted interface length.
EnergyReport energy_report(const SweepState& state, const Eigen::VectorXd& u,
                           const FEFunction& b, double interface_length);

// Mass-lumped elastic energy of a nodal tensor field.
double elastic_energy_lumped(const SweepState& state, const FEFunction& b);

// Per-step dissipation: old-state terms use the transferred quantities the
// scheme itself sees (previous velocity/tensor on the current mesh).
double dissipation_increment(const SweepState& state, const Eigen::VectorXd& u_new,
                             const FEFunction& b_new, double length_new,
                             double length_old);

struct BubbleMetrics {
  double v_c{0}, y_c{0}, circ{0}, vol_loss{0}, r{1};
};

// Benchmark quantities of the inner phase: density-weighted rise velocity,
// polygon center of mass, circularity, relative volume loss against the
// initial area, and the interface element ratio.
BubbleMetrics bubble_metrics(const SweepState& state,
                             const ElementClassification& cls,
                             const Eigen::VectorXd& u, double rho_minus,
                             double initial_area);

double min_nodal_eigenvalue(const FEFunction& b);

}  // namespace veflow

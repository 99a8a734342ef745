#pragma once

#include <Eigen/Dense>
#include <string>

#include "veflow/geometry.hpp"

namespace veflow {

// Per-phase physical constants and body forces. The minus phase is the
// enclosed one.
struct PhaseParams {
  double rho_minus{1.0}, rho_plus{1.0};
  double mu_minus{0.1}, mu_plus{0.1};
  double lambda_minus{0.01}, lambda_plus{0.01};
  double g_shear{1.0};              // uniform shear modulus
  double g_minus{0.0}, g_plus{0.0};  // variable-modulus mode
  double gamma{10.0};
  double alpha{1e-2};
  Vec2 f1{0.0, 0.0};
  Vec2 f2{0.0, 0.0};
};

struct InterfaceInit {
  enum class Shape : char { Circle, Ellipse } shape{Shape::Circle};
  Vec2 center{1.0, 0.8};
  double axis_a{0.3}, axis_b{0.3};
  int elements{400};
};

struct RunConfig {
  std::string preset;  // provenance of the defaults
  Rect domain{0, 0, 2, 2};
  int n_c{20};
  double h_f_factor{8.0};  // h_f = h_c / factor
  double dt{1e-4};
  double t_end{1.0};
  double tol{1e-12};
  int max_fp_iters{50};
  bool xfem{true};
  bool pressure_p0{false};
  bool variable_g{false};
  bool gauss_seidel{false};  // feed the fresh velocity into the tensor sweep
  int snapshot_cadence{100};
  std::string out_dir{"out"};
  PhaseParams params;
  InterfaceInit interface0;

  double h_c() const { return domain.width() / n_c; }
  double h_f() const { return h_c() / h_f_factor; }
  int n_steps() const { return static_cast<int>(std::lround(t_end / dt)); }
};

// Known presets: "retraction", "rising_bubble" (keys c0, lambda_plus),
// "rising_bubble_gvar" (keys c_plus, c_minus).
RunConfig preset_config(const std::string& name);
RunConfig preset_rising_bubble(double c0, double lambda_plus);
RunConfig preset_rising_bubble_gvar(double c_plus, double c_minus);

// Key/value config file parsing: one "key = value" pair per line, '#' starts
// a comment. A "preset" key seeds defaults before the remaining keys are
// applied. Unknown keys, malformed values and missing required keys are
// errors.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Round-trip serialization of a config.
std::string serialize_config(const RunConfig& config);

bool operator==(const RunConfig& a, const RunConfig& b);

}  // namespace veflow

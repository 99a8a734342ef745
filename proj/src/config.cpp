#include "veflow/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "veflow/errors.hpp"

namespace veflow {

namespace {

RunConfig preset_retraction() {
  RunConfig c;
  c.preset = "retraction";
  c.domain = {0, 0, 2, 2};
  c.n_c = 20;
  c.dt = 1e-4;
  c.t_end = 1.0;
  c.params.rho_minus = c.params.rho_plus = 1.0;
  c.params.mu_minus = c.params.mu_plus = 0.1;
  c.params.gamma = 10.0;
  c.params.lambda_minus = c.params.lambda_plus = 0.01;
  c.params.g_shear = 1.0;
  c.params.alpha = 1e-2;
  c.params.f1 = Vec2(0, 0);
  c.params.f2 = Vec2(0, 0);
  c.interface0.shape = InterfaceInit::Shape::Ellipse;
  c.interface0.center = Vec2(1.0, 1.0);
  c.interface0.axis_a = 0.8;
  c.interface0.axis_b = 0.2;
  c.interface0.elements = 400;
  return c;
}

}  // namespace

RunConfig preset_rising_bubble(double c0, double lambda_plus) {
  RunConfig c;
  c.preset = "rising_bubble";
  c.domain = {0, 0, 2, 4};
  c.n_c = 20;
  c.dt = 1e-4;
  c.t_end = 1.0;
  c.params.rho_plus = 1.0;
  c.params.rho_minus = 0.1;
  c.params.mu_plus = 10.25 / (1.0 + c0);
  c.params.mu_minus = 1.025;
  c.params.gamma = 10.0;
  c.params.lambda_plus = lambda_plus;
  c.params.lambda_minus = 1e-3;
  c.params.g_shear = c0 * c.params.mu_plus / lambda_plus;
  c.params.alpha = 1e-2;
  c.params.f1 = Vec2(0.0, -980.0);
  c.params.f2 = Vec2(0, 0);
  c.interface0.shape = InterfaceInit::Shape::Circle;
  c.interface0.center = Vec2(1.0, 0.8);
  c.interface0.axis_a = c.interface0.axis_b = 0.3;
  c.interface0.elements = 400;
  return c;
}

RunConfig preset_rising_bubble_gvar(double c_plus, double c_minus) {
  RunConfig c = preset_rising_bubble(c_plus, 0.05);
  c.preset = "rising_bubble_gvar";
  c.variable_g = true;
  c.params.lambda_plus = 0.05;
  c.params.lambda_minus = 0.05;
  c.params.mu_plus = 10.25 / (1.0 + c_plus);
  c.params.mu_minus = 10.25 / (1.0 + c_minus);
  c.params.g_plus = c_plus * c.params.mu_plus / c.params.lambda_plus;
  c.params.g_minus = c_minus * c.params.mu_minus / c.params.lambda_minus;
  return c;
}

RunConfig preset_config(const std::string& name) {
  if (name == "retraction") return preset_retraction();
  if (name == "rising_bubble") return preset_rising_bubble(1.0, 0.05);
  if (name == "rising_bubble_gvar")
    return preset_rising_bubble_gvar(19.5, 1.0);
  throw ConfigError("unknown preset: " + name);
}

namespace {

double to_double(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': not a number: " + value);
  }
  if (pos != value.size())
    throw ConfigError("key '" + key + "': trailing junk in value: " + value);
  return v;
}

int to_int(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  if (v != std::floor(v))
    throw ConfigError("key '" + key + "': integer expected: " + value);
  return static_cast<int>(v);
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("key '" + key + "': boolean expected: " + value);
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  std::map<std::string, std::string> pairs;
  std::vector<std::string> order;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("malformed config line: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("malformed config line: " + line);
    pairs[key] = value;
    order.push_back(key);
  }

  RunConfig c;
  double c0 = 1.0, lambda_plus = 0.05, c_plus = 19.5, c_minus = 1.0;
  const bool has_rb_keys = pairs.count("c0") || pairs.count("c_plus") ||
                           pairs.count("c_minus");
  if (auto it = pairs.find("preset"); it != pairs.end()) {
    if (pairs.count("c0")) c0 = to_double("c0", pairs["c0"]);
    if (pairs.count("lambda_plus"))
      lambda_plus = to_double("lambda_plus", pairs["lambda_plus"]);
    if (pairs.count("c_plus")) c_plus = to_double("c_plus", pairs["c_plus"]);
    if (pairs.count("c_minus"))
      c_minus = to_double("c_minus", pairs["c_minus"]);
    if (it->second == "rising_bubble")
      c = preset_rising_bubble(c0, lambda_plus);
    else if (it->second == "rising_bubble_gvar")
      c = preset_rising_bubble_gvar(c_plus, c_minus);
    else
      c = preset_config(it->second);
  } else if (has_rb_keys) {
    throw ConfigError("c0/c_plus/c_minus require a preset");
  }

  for (const auto& [key, value] : pairs) {
    if (key == "preset" || key == "c0" || key == "c_plus" ||
        key == "c_minus")
      continue;  // consumed above
    if (key == "dt")
      c.dt = to_double(key, value);
    else if (key == "t_end")
      c.t_end = to_double(key, value);
    else if (key == "tol")
      c.tol = to_double(key, value);
    else if (key == "max_fp_iters")
      c.max_fp_iters = to_int(key, value);
    else if (key == "n_c")
      c.n_c = to_int(key, value);
    else if (key == "h_f_factor")
      c.h_f_factor = to_double(key, value);
    else if (key == "xfem")
      c.xfem = to_bool(key, value);
    else if (key == "pressure_p0")
      c.pressure_p0 = to_bool(key, value);
    else if (key == "variable_g")
      c.variable_g = to_bool(key, value);
    else if (key == "gauss_seidel")
      c.gauss_seidel = to_bool(key, value);
    else if (key == "snapshot_cadence")
      c.snapshot_cadence = to_int(key, value);
    else if (key == "out_dir")
      c.out_dir = value;
    else if (key == "domain_x0")
      c.domain.x0 = to_double(key, value);
    else if (key == "domain_y0")
      c.domain.y0 = to_double(key, value);
    else if (key == "domain_x1")
      c.domain.x1 = to_double(key, value);
    else if (key == "domain_y1")
      c.domain.y1 = to_double(key, value);
    else if (key == "rho_minus")
      c.params.rho_minus = to_double(key, value);
    else if (key == "rho_plus")
      c.params.rho_plus = to_double(key, value);
    else if (key == "mu_minus")
      c.params.mu_minus = to_double(key, value);
    else if (key == "mu_plus")
      c.params.mu_plus = to_double(key, value);
    else if (key == "lambda_minus")
      c.params.lambda_minus = to_double(key, value);
    else if (key == "lambda_plus")
      c.params.lambda_plus = to_double(key, value);
    else if (key == "g_shear")
      c.params.g_shear = to_double(key, value);
    else if (key == "g_minus")
      c.params.g_minus = to_double(key, value);
    else if (key == "g_plus")
      c.params.g_plus = to_double(key, value);
    else if (key == "gamma")
      c.params.gamma = to_double(key, value);
    else if (key == "alpha")
      c.params.alpha = to_double(key, value);
    else if (key == "f1_x")
      c.params.f1.x() = to_double(key, value);
    else if (key == "f1_y")
      c.params.f1.y() = to_double(key, value);
    else if (key == "f2_x")
      c.params.f2.x() = to_double(key, value);
    else if (key == "f2_y")
      c.params.f2.y() = to_double(key, value);
    else if (key == "interface_shape") {
      if (value == "circle")
        c.interface0.shape = InterfaceInit::Shape::Circle;
      else if (value == "ellipse")
        c.interface0.shape = InterfaceInit::Shape::Ellipse;
      else
        throw ConfigError("interface_shape: circle or ellipse expected");
    } else if (key == "interface_cx")
      c.interface0.center.x() = to_double(key, value);
    else if (key == "interface_cy")
      c.interface0.center.y() = to_double(key, value);
    else if (key == "interface_a")
      c.interface0.axis_a = to_double(key, value);
    else if (key == "interface_b")
      c.interface0.axis_b = to_double(key, value);
    else if (key == "interface_elements")
      c.interface0.elements = to_int(key, value);
    else
      throw ConfigError("unknown key: " + key);
  }

  if (!(c.dt > 0)) throw ConfigError("dt must be positive");
  if (!(c.t_end >= c.dt)) throw ConfigError("t_end must be at least dt");
  if (!(c.tol > 0)) throw ConfigError("tol must be positive");
  return c;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream out;
  out.precision(17);
  auto kv = [&out](const std::string& key, auto value) {
    out << key << " = " << value << "\n";
  };
  kv("dt", c.dt);
  kv("t_end", c.t_end);
  kv("tol", c.tol);
  kv("max_fp_iters", c.max_fp_iters);
  kv("n_c", c.n_c);
  kv("h_f_factor", c.h_f_factor);
  kv("xfem", c.xfem ? "true" : "false");
  kv("pressure_p0", c.pressure_p0 ? "true" : "false");
  kv("variable_g", c.variable_g ? "true" : "false");
  kv("gauss_seidel", c.gauss_seidel ? "true" : "false");
  kv("snapshot_cadence", c.snapshot_cadence);
  if (!c.out_dir.empty()) kv("out_dir", c.out_dir);
  kv("domain_x0", c.domain.x0);
  kv("domain_y0", c.domain.y0);
  kv("domain_x1", c.domain.x1);
  kv("domain_y1", c.domain.y1);
  kv("rho_minus", c.params.rho_minus);
  kv("rho_plus", c.params.rho_plus);
  kv("mu_minus", c.params.mu_minus);
  kv("mu_plus", c.params.mu_plus);
  kv("lambda_minus", c.params.lambda_minus);
  kv("lambda_plus", c.params.lambda_plus);
  kv("g_shear", c.params.g_shear);
  kv("g_minus", c.params.g_minus);
  kv("g_plus", c.params.g_plus);
  kv("gamma", c.params.gamma);
  kv("alpha", c.params.alpha);
  kv("f1_x", c.params.f1.x());
  kv("f1_y", c.params.f1.y());
  kv("f2_x", c.params.f2.x());
  kv("f2_y", c.params.f2.y());
  kv("interface_shape",
     c.interface0.shape == InterfaceInit::Shape::Circle ? "circle"
                                                        : "ellipse");
  kv("interface_cx", c.interface0.center.x());
  kv("interface_cy", c.interface0.center.y());
  kv("interface_a", c.interface0.axis_a);
  kv("interface_b", c.interface0.axis_b);
  kv("interface_elements", c.interface0.elements);
  return out.str();
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  return serialize_config(a) == serialize_config(b);
}

}  // namespace veflow

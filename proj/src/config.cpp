#include "rigidlim/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <sstream>

namespace rigidlim {

namespace pt = boost::property_tree;

int SweepFamily::grid_n(double side) const {
  if (eps_list.empty()) throw Error("sweep: eps_list is empty");
  const double r_min = radius(*std::min_element(eps_list.begin(), eps_list.end()));
  int n = 16;
  while (r_min / (side / n) < cells_per_radius - 1e-9) {
    n *= 2;
    if (n > max_n)
      throw Error("sweep: resolving the smallest body with " + std::to_string(cells_per_radius) +
                  " cells needs N > max_n = " + std::to_string(max_n));
  }
  return n;
}

void SweepFamily::validate() const {
  if (eps_list.empty()) throw Error("sweep: eps_list is empty");
  for (std::size_t k = 0; k < eps_list.size(); ++k) {
    if (!(eps_list[k] > 0.0)) throw Error("sweep: eps values must be positive");
    if (k > 0 && !(eps_list[k] < eps_list[k - 1])) throw Error("sweep: eps_list must be strictly decreasing");
  }
  if (!(radius.factor > 0.0 && radius.factor <= 1.0)) throw Error("sweep: radius factor must lie in (0, 1]");
  if (!(density.coefficient > 0.0)) throw Error("sweep: density coefficient must be positive");
  if (dimension != 2 && dimension != 3) throw Error("sweep: dimension must be 2 or 3");
  if (!(delta > 0.0) || !(delta_tilde > 0.0 && delta_tilde < 1.0))
    throw Error("sweep: need delta > 0 and 0 < delta_tilde < 1");
  if (!(cells_per_radius >= 1.0)) throw Error("sweep: cells_per_radius must be at least 1");
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    const auto e = item.find_last_not_of(" \t");
    const std::string tok = item.substr(b, e - b + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw Error("cannot parse '" + tok + "' as a number");
    out.push_back(v);
  }
  return out;
}

AppConfig default_config() {
  AppConfig c;
  c.sim.n = 1024;
  c.sim.final_time = 2.0;
  c.sim.viscosity = 0.01;
  c.sim.radius = 0.1;
  c.sim.position = {kPi / 2 + 0.5, kPi / 2};
  return c;
}

AppConfig load_config(const std::string& path) {
  pt::ptree tree;
  try {
    pt::read_ini(path, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error("config: " + std::string(e.what()));
  }
  static const std::vector<std::string> sections{"grid", "fluid", "body", "sweep", "output"};
  static const std::vector<std::string> keys{
      "grid.n", "grid.side", "grid.cells_per_radius", "grid.max_n", "fluid.viscosity", "fluid.background",
      "fluid.uniform_u", "fluid.uniform_v", "fluid.final_time", "fluid.dt", "fluid.cfl", "fluid.penalty",
      "fluid.energy_tol", "fluid.initial", "body.enabled", "body.radius", "body.density", "body.x", "body.y",
      "body.angle", "body.velocity_x", "body.velocity_y", "body.angular_velocity", "body.eps",
      "body.min_restriction_resolution", "sweep.eps_list", "sweep.radius_factor", "sweep.density_coefficient",
      "sweep.density_exponent", "sweep.dimension", "sweep.delta", "sweep.delta_tilde", "sweep.c_growth",
      "sweep.slack", "sweep.rest_stability", "sweep.slip_stability", "sweep.seed", "sweep.force", "output.dir",
      "output.sample_every", "output.dump_every"};
  for (const auto& [section, body] : tree) {
    if (std::find(sections.begin(), sections.end(), section) == sections.end())
      throw Error("config: unknown section [" + section + "]");
    for (const auto& [key, _] : body)
      if (std::find(keys.begin(), keys.end(), section + "." + key) == keys.end())
        throw Error("config: unknown key '" + key + "' in [" + section + "]");
  }

  AppConfig c = default_config();
  auto get = [&](const char* key, auto fallback) {
    try {
      if (!tree.get_child_optional(key)) return fallback;
      return tree.get<decltype(fallback)>(key);
    } catch (const pt::ptree_bad_data&) {
      throw Error(std::string("config: bad value for ") + key);
    }
  };

  SimConfig& s = c.sim;
  if (auto n = tree.get_optional<std::string>("grid.n"); n && *n != "auto") {
    s.n = get("grid.n", s.n);
    c.explicit_n = true;
  }
  s.side = get("grid.side", s.side);
  c.family.cells_per_radius = get("grid.cells_per_radius", c.family.cells_per_radius);
  c.family.max_n = get("grid.max_n", c.family.max_n);

  s.viscosity = get("fluid.viscosity", s.viscosity);
  s.background = get("fluid.background", s.background);
  s.uniform_velocity.x = get("fluid.uniform_u", s.uniform_velocity.x);
  s.uniform_velocity.y = get("fluid.uniform_v", s.uniform_velocity.y);
  s.final_time = get("fluid.final_time", s.final_time);
  s.dt = get("fluid.dt", s.dt);
  s.cfl = get("fluid.cfl", s.cfl);
  s.penalty = get("fluid.penalty", s.penalty);
  s.energy_tol = get("fluid.energy_tol", s.energy_tol);
  const std::string init = get("fluid.initial", std::string("restricted"));
  if (init == "restricted") s.initial = InitialField::Restricted;
  else if (init == "background") s.initial = InitialField::Background;
  else if (init == "quiescent") s.initial = InitialField::Quiescent;
  else throw Error("config: fluid.initial must be restricted, background or quiescent");

  s.has_body = get("body.enabled", s.has_body);
  s.radius = get("body.radius", s.radius);
  s.density = get("body.density", s.density);
  s.position.x = get("body.x", s.position.x);
  s.position.y = get("body.y", s.position.y);
  s.angle = get("body.angle", s.angle);
  if (tree.get_optional<double>("body.velocity_x") || tree.get_optional<double>("body.velocity_y")) {
    s.body_velocity_set = true;
    s.body_velocity = {get("body.velocity_x", 0.0), get("body.velocity_y", 0.0)};
  }
  s.angular_velocity = get("body.angular_velocity", s.angular_velocity);
  s.eps = get("body.eps", s.eps);
  s.min_restriction_resolution = get("body.min_restriction_resolution", s.min_restriction_resolution);

  SweepFamily& f = c.family;
  if (auto list = tree.get_optional<std::string>("sweep.eps_list")) f.eps_list = parse_list(*list);
  f.radius.factor = get("sweep.radius_factor", f.radius.factor);
  f.density.coefficient = get("sweep.density_coefficient", f.density.coefficient);
  f.density.exponent = get("sweep.density_exponent", f.density.exponent);
  f.dimension = get("sweep.dimension", f.dimension);
  f.delta = get("sweep.delta", f.delta);
  f.delta_tilde = get("sweep.delta_tilde", f.delta_tilde);
  c.checks.c_growth = get("sweep.c_growth", c.checks.c_growth);
  c.checks.slack = get("sweep.slack", c.checks.slack);
  c.checks.rest_stability = get("sweep.rest_stability", c.checks.rest_stability);
  c.checks.slip_stability = get("sweep.slip_stability", c.checks.slip_stability);
  c.checks.seed = get("sweep.seed", c.checks.seed);
  c.checks.force = get("sweep.force", c.checks.force);

  c.output.dir = get("output.dir", c.output.dir);
  s.sample_every = get("output.sample_every", s.sample_every);
  c.output.dump_every = get("output.dump_every", c.output.dump_every);
  return c;
}

}  // namespace rigidlim

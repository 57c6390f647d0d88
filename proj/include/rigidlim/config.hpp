#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "rigidlim/fsi.hpp"

namespace rigidlim {

/// Body radius as a function of eps.
struct RadiusRule {
  double factor = 1.0;  // r_eps = factor * eps, 0 < factor <= 1
  double operator()(double eps) const { return factor * eps; }
};

/// Body density as a function of eps: coefficient * eps^exponent.
struct DensityRule {
  double coefficient = 1.0;
  double exponent = 0.0;
  double operator()(double eps) const { return coefficient * std::pow(eps, exponent); }
};

/// An eps-indexed family of bodies.
struct SweepFamily {
  std::vector<double> eps_list{0.1, 0.07, 0.05};
  RadiusRule radius;
  DensityRule density;
  int dimension = 2;
  double delta = 0.25;
  double delta_tilde = 0.5;
  /// Grid rule: smallest power of two giving this many cells across the smallest radius.
  double cells_per_radius = 8.0;
  int max_n = 1024;

  double mass(double eps) const { return density(eps) * area(eps); }
  double area(double eps) const { return kPi * radius(eps) * radius(eps); }
  /// One grid for every member.
  int grid_n(double side) const;
  /// Throws unless eps_list is strictly decreasing and every member is admissible.
  void validate() const;
};

struct OutputConfig {
  std::string dir = "out";
  /// Field dump every k-th sample (0: off).
  int dump_every = 0;
};

struct CheckConfig {
  /// Growth constant C in front of int int rho |w|^2.
  double c_growth = 2.0;
  double slack = 0.10;
  double rest_stability = 0.50;
  double slip_stability = 0.20;
  unsigned long long seed = 20240601ULL;
  /// Run members even when the family violates the theorem hypotheses.
  bool force = false;
};

struct AppConfig {
  SimConfig sim;
  SweepFamily family;
  OutputConfig output;
  CheckConfig checks;
  /// Whether [grid] n was given explicitly (otherwise the family rule decides).
  bool explicit_n = false;
};

/// Defaults of the reference experiment.
AppConfig default_config();
/// Reads an INI file with sections [grid], [fluid], [body], [sweep], [output] on top of the defaults.
AppConfig load_config(const std::string& path);
/// Parses a comma-separated list of reals.
std::vector<double> parse_list(const std::string& text);

}  // namespace rigidlim

// Python bindings for the main operations. Grid arrays are (n, n) with row j, column i.
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "rigidlim/background.hpp"
#include "rigidlim/bogovskii.hpp"
#include "rigidlim/config.hpp"
#include "rigidlim/diagnostics.hpp"
#include "rigidlim/harness.hpp"
#include "rigidlim/restriction.hpp"
#include "rigidlim/spectral.hpp"
#include "rigidlim/stats.hpp"

namespace py = pybind11;
using namespace rigidlim;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array to_array(const std::vector<double>& v, int n) {
  Array a({n, n});
  std::memcpy(a.mutable_data(), v.data(), v.size() * sizeof(double));
  return a;
}

VectorField2D from_arrays(const Array& u, const Array& v, double side) {
  if (u.ndim() != 2 || u.shape(0) != u.shape(1) || v.ndim() != 2 || v.shape(0) != u.shape(0) || v.shape(1) != u.shape(1))
    throw Error("expected two square arrays of equal shape");
  const int n = static_cast<int>(u.shape(0));
  VectorField2D f{Grid2D(n, side)};
  std::copy(u.data(), u.data() + u.size(), f.u_data().begin());
  std::copy(v.data(), v.data() + v.size(), f.v_data().begin());
  return f;
}

py::dict slope_dict(const SlopeFit& f) {
  py::dict d;
  d["slope"] = f.slope;
  d["intercept"] = f.intercept;
  d["stderr"] = f.stderr_slope;
  return d;
}

Vec2 point(const std::pair<double, double>& p) { return {p.first, p.second}; }

py::dict summary_dict(const RunSummary& m) {
  py::dict d;
  d["id"] = m.id;
  d["eps"] = m.eps;
  d["radius"] = m.radius;
  d["density"] = m.density;
  d["n"] = m.n;
  d["dt"] = m.dt;
  d["steps"] = m.steps;
  d["slip_l2"] = m.slip_l2;
  d["traj_gap_sup"] = m.traj_gap_sup;
  d["tracer_refinement"] = m.tracer_refinement;
  d["fitted_c_rest"] = m.eval.relative.fitted_c_rest;
  d["slip_constant"] = m.eval.slip.constant;
  d["energy_violation"] = m.eval.energy.max_violation;
  d["pass"] = m.eval.pass();
  return d;
}

}  // namespace

PYBIND11_MODULE(_rigidlim, m) {
  m.doc() = "Rigid-body limit experiments: restriction operator, Bogovskii solver, FSI solver and diagnostics.";
  py::register_exception<Error>(m, "RigidlimError", PyExc_ValueError);

  m.def(
      "taylor_green_velocity",
      [](double t, double x, double y, double nu) {
        const Vec2 v = taylor_green(nu)(t, {x, y});
        return std::make_pair(v.x, v.y);
      },
      py::arg("t"), py::arg("x"), py::arg("y"), py::arg("nu") = 0.01);

  m.def(
      "sample_taylor_green",
      [](int n, double t, double nu) {
        const VectorField2D f = sample_background(taylor_green(nu), Grid2D(n, 2.0 * kPi), t);
        return py::make_tuple(to_array(f.u_data(), n), to_array(f.v_data(), n));
      },
      py::arg("n"), py::arg("t") = 0.0, py::arg("nu") = 0.01,
      "Staggered samples (u at x-faces, v at y-faces) of the Taylor-Green field.");

  m.def(
      "restrict_field",
      [](const Array& u, const Array& v, double eps, std::pair<double, double> center, double side, double min_resolution) {
        RestrictionOptions opts;
        opts.min_resolution = min_resolution;
        const RestrictionResult r = restrict_field(from_arrays(u, v, side), eps, point(center), opts);
        const int n = r.field.grid().n();
        py::dict d;
        d["u"] = to_array(r.field.u_data(), n);
        d["v"] = to_array(r.field.v_data(), n);
        d["body_value"] = std::make_pair(r.body_value.x, r.body_value.y);
        d["divergence_residual"] = r.divergence_residual;
        d["rigidity_residual"] = r.rigidity_residual;
        return d;
      },
      py::arg("u"), py::arg("v"), py::arg("eps"), py::arg("center"), py::arg("side") = 2.0 * kPi,
      py::arg("min_resolution") = 16.0);

  m.def(
      "restriction_scaling",
      [](double p, const std::vector<double>& eps_list, std::pair<double, double> center, int cells_per_eps) {
        const ScalingStudy s = restriction_scaling_study(
            [](Vec2 x) { return Vec2{std::sin(x.x) * std::cos(x.y), -std::cos(x.x) * std::sin(x.y)}; }, p, eps_list,
            point(center), cells_per_eps);
        py::dict d;
        d["p"] = s.p;
        d["theoretical_slope"] = s.theoretical_slope;
        d["slope_lp"] = slope_dict(s.slope_lp);
        d["slope_grad_lp"] = slope_dict(s.slope_grad_lp);
        py::list rows;
        for (const auto& r : s.rows) {
          py::dict row;
          row["eps"] = r.eps;
          row["err_lp"] = r.err_lp;
          row["err_grad_lp"] = r.err_grad_lp;
          rows.append(row);
        }
        d["rows"] = rows;
        return d;
      },
      py::arg("p"), py::arg("eps_list"), py::arg("center") = std::make_pair(1.0, 0.7), py::arg("cells_per_eps") = 16,
      "Restriction error norms of the Taylor-Green field and their log-log slopes.");

  m.def(
      "bogovskii_check",
      [](double eps, int resolution, int num_random, unsigned long long seed) {
        const BogovskiiSolver s(AnnulusMesh::scaled(resolution, eps));
        const AnnulusMesh& mesh = s.mesh();
        double residual = 0.0, trace = 0.0, ratio = 0.0;
        for (int k = 0; k < num_random; ++k) {
          const auto f = random_annulus_source(s, seed + static_cast<unsigned long long>(k));
          const BogovskiiSolution sol = s.solve(f);
          residual = std::max(residual, sol.residual);
          trace = std::max(trace, sol.trace_max);
          const double l2 = mesh.l2_faces(sol.field), grad = mesh.gradient_l2(sol.field);
          ratio = std::max(ratio, std::sqrt(l2 * l2 + grad * grad) / mesh.l2_cells(f));
        }
        py::dict d;
        d["residual"] = residual;
        d["trace_max"] = trace;
        d["norm_ratio"] = ratio;
        return d;
      },
      py::arg("eps"), py::arg("resolution") = 16, py::arg("num_random") = 20, py::arg("seed") = 20240601ULL);

  m.def(
      "rest_bound",
      [](int d, double eps, double mass, double area, double delta, double delta_tilde, double C) {
        RestBoundParams p;
        p.d = d;
        p.eps = eps;
        p.mass = mass;
        p.area = area;
        p.delta = delta;
        p.delta_tilde = delta_tilde;
        p.C = C;
        return rest_bound(p);
      },
      py::arg("d"), py::arg("eps"), py::arg("mass"), py::arg("area"), py::arg("delta") = 0.25,
      py::arg("delta_tilde") = 0.5, py::arg("C") = 1.0);

  m.def(
      "check_assumptions",
      [](const std::vector<double>& eps_list, double radius_factor, double density_coefficient, double density_exponent,
         int dimension) {
        SweepFamily f;
        f.eps_list = eps_list;
        f.radius.factor = radius_factor;
        f.density.coefficient = density_coefficient;
        f.density.exponent = density_exponent;
        f.dimension = dimension;
        f.validate();
        const AssumptionReport r = check_assumptions(f);
        py::dict out;
        for (const AssumptionFlag& flag : r.flags) {
          py::dict d;
          d["verdict"] = to_string(flag.verdict);
          d["binding"] = flag.binding;
          d["blocking"] = flag.blocking();
          d["values"] = flag.values;
          d["warning"] = flag.warning;
          out[py::str(flag.name)] = d;
        }
        return out;
      },
      py::arg("eps_list"), py::arg("radius_factor") = 1.0, py::arg("density_coefficient") = 1.0,
      py::arg("density_exponent") = 0.0, py::arg("dimension") = 2);

  m.def(
      "sobolev_study",
      [](int n, const std::vector<double>& eps_list, int fields, double p, unsigned long long seed) {
        const SobolevStudy s = sobolev_study(Grid2D(n, 2.0 * kPi), eps_list, fields, p, seed, {kPi, kPi});
        py::dict d;
        d["constant"] = s.constant;
        d["spread"] = s.spread;
        std::vector<double> hi;
        for (const auto& r : s.rows) hi.push_back(r.max_ratio);
        d["max_ratio"] = hi;
        return d;
      },
      py::arg("n"), py::arg("eps_list"), py::arg("fields") = 50, py::arg("p") = 4.0, py::arg("seed") = 20240601ULL);

  m.def(
      "fit_slope",
      [](const std::vector<double>& eps, const std::vector<double>& values) {
        if (eps.size() != values.size()) throw Error("fit_slope: eps and values differ in length");
        std::vector<std::pair<double, double>> pairs;
        for (std::size_t k = 0; k < eps.size(); ++k) pairs.emplace_back(eps[k], values[k]);
        return slope_dict(fit_slope(pairs));
      },
      py::arg("eps"), py::arg("values"));

  m.def(
      "tracer_trajectory",
      [](std::pair<double, double> h0, double T, double dt, double nu) {
        const TracerTrajectory tr = tracer_trajectory(taylor_green(nu), point(h0), T, dt);
        std::vector<double> x, y;
        for (const Vec2& p : tr.position) {
          x.push_back(p.x);
          y.push_back(p.y);
        }
        return py::make_tuple(tr.t, x, y);
      },
      py::arg("h0"), py::arg("T"), py::arg("dt"), py::arg("nu") = 0.01,
      "RK4 path of a passive tracer in the Taylor-Green flow: (t, x, y).");

  m.def(
      "simulate",
      [](const std::string& config_path, const std::string& out_dir) {
        const AppConfig cfg = load_config(config_path);
        const BackgroundSolution bg = make_background(cfg.sim.background, cfg.sim.viscosity, cfg.sim.uniform_velocity);
        RunSummary s;
        {
          py::gil_scoped_release release;
          s = run_member(cfg, bg, out_dir);
        }
        return summary_dict(s);
      },
      py::arg("config"), py::arg("out_dir") = std::string{},
      "Runs one coupled simulation from an INI file; writes timeseries.csv and run.json when out_dir is set.");

  m.def(
      "sweep",
      [](const std::string& config_path, const std::string& out_dir, int threads, bool force) {
        AppConfig cfg = load_config(config_path);
        cfg.output.dir = out_dir;
        cfg.checks.force = cfg.checks.force || force;
        SweepReport rep;
        {
          py::gil_scoped_release release;
          rep = run_sweep(cfg, threads);
          if (!out_dir.empty()) write_sweep_outputs(rep, cfg, out_dir);
        }
        py::dict d;
        d["pass"] = rep.pass();
        d["n"] = rep.n;
        d["outside_hypotheses"] = rep.outside_hypotheses;
        d["failures"] = rep.failures;
        d["slip_monotone"] = rep.slip_monotone;
        d["gap_monotone"] = rep.gap_monotone;
        d["rest_spread"] = rep.rest_spread;
        d["slip_spread"] = rep.slip_spread;
        py::list members;
        for (const auto& mem : rep.members) members.append(summary_dict(mem));
        d["members"] = members;
        return d;
      },
      py::arg("config"), py::arg("out_dir") = std::string{}, py::arg("threads") = 0, py::arg("force") = false);
}

#include <numbers>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "mgsr/bench.hpp"
#include "mgsr/error.hpp"
#include "mgsr/grid.hpp"
#include "mgsr/linear_stencil.hpp"
#include "mgsr/multigrid.hpp"
#include "mgsr/prolongation.hpp"
#include "mgsr/spectral.hpp"
#include "mgsr/spline.hpp"
#include "mgsr/symlog.hpp"
#include "mgsr/weights.hpp"

namespace py = pybind11;
using namespace mgsr;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Grid to_grid(const Array& a, double h) {
  if (a.ndim() != 2 || a.shape(0) != a.shape(1)) throw ShapeError("expected a square 2-D array");
  const auto n = static_cast<int>(a.shape(0));
  std::vector<double> values(a.data(), a.data() + a.size());
  return Grid(n, h, std::move(values));
}

Array to_array(const Grid& g) {
  Array out({g.n(), g.n()});
  std::copy(g.values().begin(), g.values().end(), out.mutable_data());
  return out;
}

double default_h(const Array& a) { return a.ndim() >= 1 && a.shape(0) > 0 ? 2.0 * std::numbers::pi / a.shape(0) : 1.0; }

double pick_h(const Array& a, std::optional<double> h) { return h ? *h : default_h(a); }

MultigridConfig make_config(const py::dict& kw) {
  MultigridConfig c;
  for (auto item : kw) {
    const auto key = item.first.cast<std::string>();
    if (key == "n_smooth_pre") {
      c.n_smooth_pre = item.second.cast<int>();
    } else if (key == "n_smooth") {
      c.n_smooth = item.second.cast<int>();
    } else if (key == "n_step") {
      c.n_step = item.second.cast<int>();
    } else if (key == "r_min") {
      c.r_min = item.second.cast<int>();
    } else if (key == "tol") {
      c.tol = item.second.cast<double>();
    } else if (key == "tol_relative") {
      c.tol_relative = item.second.cast<bool>();
    } else if (key == "max_iter") {
      c.max_iter = item.second.cast<int>();
    } else if (key == "coarse_tol") {
      c.coarse_tol = item.second.cast<double>();
    } else if (key == "coarse_max_sweeps") {
      c.coarse_max_sweeps = item.second.cast<int>();
    } else if (key == "mode") {
      c.cycle_mode = parse_cycle_mode(item.second.cast<std::string>());
    } else if (key == "restriction") {
      c.restriction = parse_restriction(item.second.cast<std::string>());
    } else {
      throw ConfigError("unknown solver option '" + key + "'");
    }
  }
  c.validate();
  return c;
}

py::dict trace_dict(const ConvergenceTrace& t) {
  std::vector<double> dp;
  std::vector<double> res;
  std::vector<std::string> ops;
  for (const auto& r : t.records) {
    dp.push_back(r.norm_dp);
    res.push_back(r.norm_residual);
    ops.push_back(r.op);
  }
  py::dict d;
  d["converged"] = t.converged;
  d["iterations"] = t.iterations;
  d["threshold"] = t.threshold;
  d["norm_dp"] = dp;
  d["norm_residual"] = res;
  d["operator"] = ops;
  return d;
}

}  // namespace

PYBIND11_MODULE(_mgsr, m) {
  m.doc() = "Two-level multigrid Poisson solver with learned prolongation operators.";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);

  m.def("laplacian", [](const Array& p, std::optional<double> h) { return to_array(laplacian(to_grid(p, pick_h(p, h)))); },
        py::arg("p"), py::arg("h") = py::none(), "Periodic 5-point Laplacian; h defaults to 2*pi/n.");
  m.def(
      "residual",
      [](const Array& p, const Array& f, std::optional<double> h) {
        const double hh = pick_h(p, h);
        return to_array(residual(to_grid(p, hh), to_grid(f, hh)));
      },
      py::arg("p"), py::arg("f"), py::arg("h") = py::none());
  m.def(
      "gauss_seidel",
      [](const Array& p, const Array& f, int sweeps, std::optional<double> h) {
        const double hh = pick_h(p, h);
        return to_array(gauss_seidel(to_grid(p, hh), to_grid(f, hh), sweeps));
      },
      py::arg("p"), py::arg("f"), py::arg("sweeps"), py::arg("h") = py::none(),
      "Red-black Gauss-Seidel sweeps followed by mean anchoring.");
  m.def(
      "restrict",
      [](const Array& g, int k, const std::string& kind) {
        return to_array(restrict_k(to_grid(g, default_h(g)), k, parse_restriction(kind)));
      },
      py::arg("g"), py::arg("k") = 1, py::arg("kind") = "injection");
  m.def("spline_prolong", [](const Array& g, int factor) { return to_array(spline_prolong(to_grid(g, default_h(g)), factor)); },
        py::arg("g"), py::arg("factor"));
  m.def("fft_poisson_solve",
        [](const Array& f, std::optional<double> h) { return to_array(fft_poisson_solve(to_grid(f, pick_h(f, h)))); },
        py::arg("f"), py::arg("h") = py::none());

  m.def(
      "symlog_normalize",
      [](const Array& g, double p_min, double p_max) {
        return to_array(symlog_normalize(to_grid(g, 1.0), NormalizationSpec{p_min, p_max}));
      },
      py::arg("g"), py::arg("p_min") = 1e-10, py::arg("p_max") = 1e-3);
  m.def(
      "symlog_denormalize",
      [](const Array& g, double p_min, double p_max) {
        return to_array(symlog_denormalize(to_grid(g, 1.0), NormalizationSpec{p_min, p_max}));
      },
      py::arg("g"), py::arg("p_min") = 1e-10, py::arg("p_max") = 1e-3);

  m.def(
      "power_spectrum",
      [](const Array& g) {
        const auto s = power_spectrum(to_grid(g, default_h(g)));
        return py::make_tuple(s.power, s.modes);
      },
      py::arg("g"), "Returns (power per shell, mode count per shell).");

  m.def(
      "solve",
      [](const Array& f, std::optional<Array> p0, const std::string& op, std::optional<std::string> alternate_with,
         std::optional<double> h, const py::kwargs& kw) {
        const double hh = pick_h(f, h);
        const Grid source = to_grid(f, hh);
        const MultigridConfig cfg = make_config(kw);
        Grid start = p0 ? to_grid(*p0, hh) : Grid(source.n(), hh);
        const int factor = cfg.coarsening_factor();
        const Schedule sched = alternate_with ? Schedule::alternate(make_operator(op, factor), make_operator(*alternate_with, factor))
                                              : Schedule::single(make_operator(op, factor));
        SolveResult res;
        {
          py::gil_scoped_release release;
          res = solve(std::move(start), source, cfg, sched);
        }
        return py::make_tuple(to_array(res.solution), trace_dict(res.trace));
      },
      py::arg("f"), py::arg("p0") = py::none(), py::arg("op") = "spline", py::arg("alternate_with") = py::none(),
      py::arg("h") = py::none(),
      "Two-level multigrid solve. Solver options (n_smooth_pre, n_smooth, n_step, r_min, tol, max_iter, mode, "
      "restriction, ...) are keyword arguments. Returns (solution, trace dict).");

  m.def("read_pgrd", [](const std::filesystem::path& path) {
    const Grid g = read_pgrd(path);
    return py::make_tuple(to_array(g), g.h());
  });
  m.def(
      "write_pgrd", [](const Array& g, double h, const std::filesystem::path& path) { write_pgrd(to_grid(g, h), path); },
      py::arg("g"), py::arg("h"), py::arg("path"));

  m.def(
      "fit_linear_stencil",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& inputs,
         const py::array_t<double, py::array::c_style | py::array::forcecast>& targets, double ridge,
         const std::filesystem::path& out) {
        if (inputs.ndim() != 2 || inputs.shape(1) != 36 || targets.ndim() != 2 || targets.shape(1) != 576 ||
            inputs.shape(0) != targets.shape(0)) {
          throw ShapeError("expected inputs (N, 36) and targets (N, 576)");
        }
        std::vector<WindowPair> pairs(static_cast<std::size_t>(inputs.shape(0)));
        for (std::size_t k = 0; k < pairs.size(); ++k) {
          pairs[k].input.assign(inputs.data(k, 0), inputs.data(k, 0) + 36);
          pairs[k].target.assign(targets.data(k, 0), targets.data(k, 0) + 576);
        }
        write_srwt(fit_linear_stencil(pairs, ridge), out);
      },
      py::arg("inputs"), py::arg("targets"), py::arg("ridge"), py::arg("out"));
}

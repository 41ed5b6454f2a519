#include "sparseid/errors.hpp"
#include "sparseid/experiments.hpp"
#include "sparseid/metrics.hpp"
#include "sparseid/numerics.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace sparseid;

namespace {

CoefficientMatrix coefficients(const Matrix& values) {
  CoefficientMatrix c;
  c.values = values;
  c.column_names.resize(static_cast<std::size_t>(values.cols()));
  return c;
}

py::dict fit_to_dict(const SystemFit& fit) {
  py::dict d;
  d["coefficients"] = fit.coefficients.values;
  d["terms"] = fit.coefficients.column_names;
  std::vector<std::size_t> iterations;
  std::vector<bool> converged;
  for (const FitResult& r : fit.equations) {
    iterations.push_back(r.iterations_used);
    converged.push_back(r.converged);
  }
  d["iterations"] = iterations;
  d["converged"] = converged;
  return d;
}

SolverOptions solver_options(std::optional<std::size_t> sparsity,
                             std::optional<double> threshold) {
  SolverOptions o;
  if (sparsity) o.sparsity = std::vector<std::size_t>{*sparsity};
  if (threshold) o.threshold = std::vector<double>{*threshold};
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sparse model discovery with thresholded least squares and hard thresholding pursuit";

  static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
  static py::exception<ContractError> contract(m, "ContractError", base.ptr());
  static py::exception<IntegrationError> integration(m, "IntegrationError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ContractError& e) {
      py::set_error(contract, e.what());
    } catch (const IntegrationError& e) {
      py::set_error(integration, e.what());
    } catch (const Error& e) {
      py::set_error(base, e.what());
    }
  });

  m.def("system_names", &system_names);
  m.def("algorithm_names", [] {
    std::vector<std::string> names;
    for (Algorithm a : kAllAlgorithms) names.emplace_back(algorithm_name(a));
    return names;
  });

  m.def(
      "simulate",
      [](const std::string& system, std::optional<double> tf, std::optional<double> dt,
         double fhn_cubic_sign) {
        SystemOptions o;
        o.name = system;
        o.tf = tf;
        o.dt = dt;
        o.fhn_cubic_sign = fhn_cubic_sign;
        const TimeSeries x = simulate(make_system_setup(o));
        return py::make_tuple(Vector(x.times()), Matrix(x.states()), x.names());
      },
      py::arg("system") = "lorenz", py::arg("tf") = py::none(), py::arg("dt") = py::none(),
      py::arg("fhn_cubic_sign") = 1.0,
      "Returns (t, states, names) sampled on the system's grid.");

  m.def(
      "fit",
      [](const Matrix& states, const Matrix& derivatives, std::vector<std::string> names,
         std::size_t degree, const std::string& algorithm, std::optional<std::size_t> sparsity,
         std::optional<double> threshold, std::uint64_t seed) {
        if (names.empty()) {
          for (Index j = 0; j < states.cols(); ++j) names.push_back("x" + std::to_string(j + 1));
        }
        const TimeSeries x(0.0, 1.0, states, names);
        LibrarySpec library;
        library.poly_degree = degree;
        library.variable_names = names;
        const std::size_t d = static_cast<std::size_t>(states.cols());
        const auto configs =
            equation_configs(parse_algorithm(algorithm), solver_options(sparsity, threshold), {},
                             {}, d, seed);
        py::gil_scoped_release release;
        const SystemFit fit = fit_system(x, derivatives, library, configs);
        py::gil_scoped_acquire acquire;
        return fit_to_dict(fit);
      },
      py::arg("states"), py::arg("derivatives"), py::arg("names") = std::vector<std::string>{},
      py::arg("degree") = 2, py::arg("algorithm") = "shtrep", py::arg("sparsity") = py::none(),
      py::arg("threshold") = py::none(), py::arg("seed") = 0,
      "Fits one sparse equation per state column against a polynomial library.");

  m.def(
      "fit_system",
      [](const std::string& system, const std::string& algorithm,
         std::optional<std::size_t> sparsity, std::optional<double> threshold,
         double noise_variance, bool analytic_derivatives, std::uint64_t seed) {
        FitOptions o;
        o.system.name = system;
        o.algorithm = parse_algorithm(algorithm);
        o.solver = solver_options(sparsity, threshold);
        o.noise_variance = noise_variance;
        o.analytic_derivatives = analytic_derivatives;
        o.seed = seed;
        const FitReport r = run_fit(o);
        py::dict d = fit_to_dict(r.fit);
        d["model"] = format_model(r);
        d["rel_l1"] = r.rel_l1;
        d["rel_l2"] = r.rel_l2;
        return d;
      },
      py::arg("system") = "lorenz", py::arg("algorithm") = "shtrep",
      py::arg("sparsity") = py::none(), py::arg("threshold") = py::none(),
      py::arg("noise_variance") = 0.0, py::arg("analytic_derivatives") = false,
      py::arg("seed") = 0, "Simulates a built-in system and fits it with its preset library.");

  m.def(
      "rel_l1_error",
      [](const Matrix& estimate, const Matrix& truth) {
        return rel_l1_error(coefficients(estimate), coefficients(truth));
      },
      py::arg("estimate"), py::arg("truth"));
  m.def(
      "rel_l2_error",
      [](const Matrix& estimate, const Matrix& truth) {
        return rel_l2_error(coefficients(estimate), coefficients(truth));
      },
      py::arg("estimate"), py::arg("truth"));

  m.def(
      "top_s_support",
      [](const Vector& v, std::size_t s) { return top_s_support(v, s).indices(); },
      py::arg("v"), py::arg("s"));
  m.def(
      "lambda_support",
      [](const Vector& v, double lambda) { return lambda_support(v, lambda).indices(); },
      py::arg("v"), py::arg("threshold"));
}

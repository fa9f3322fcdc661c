#include "sublin/cli.hpp"
#include "sublin/config.hpp"
#include "sublin/galerkin.hpp"
#include "sublin/pipeline.hpp"
#include "sublin/records.hpp"
#include "sublin/reference.hpp"
#include "sublin/strauss.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

namespace py = pybind11;
using namespace sublin;

namespace {

// Records already have a canonical JSON form; reuse it rather than mirroring every struct.
py::object to_python(const nlohmann::json& doc) {
  return py::module_::import("json").attr("loads")(doc.dump());
}

nlohmann::json from_python(const py::object& obj) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

Nonlinearity nonlinearity(const std::string& name, double p, double C, double truncation, int dimension) {
  CatalogParams params;
  params.p = p;
  params.C = C;
  params.truncation = truncation;
  params.dimension = dimension;
  return make_catalog_nonlinearity(name, params);
}

RunConfig run_config(const py::dict& config) {
  ConfigFile file = parse_config(from_python(config));
  resolve_lambda(file);
  return file.run;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Galerkin existence solver for -Δv = λ v^q + f(v) with Dirichlet data";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<MonotonicityError>(m, "MonotonicityError", PyExc_RuntimeError);

  py::class_<ModelDomain>(m, "Domain")
      .def_static("interval", &ModelDomain::interval, py::arg("L") = 1.0)
      .def_static("rectangle", &ModelDomain::rectangle, py::arg("L1") = 1.0, py::arg("L2") = 1.0)
      .def_property_readonly("dimension", &ModelDomain::dimension)
      .def_property_readonly("measure", &ModelDomain::measure)
      .def_property_readonly("lambda1", &ModelDomain::lambda1)
      .def("__repr__", &ModelDomain::describe);

  py::class_<Nonlinearity>(m, "Nonlinearity")
      .def(py::init(&nonlinearity), py::arg("name"), py::arg("p") = 3.0, py::arg("C") = 1.0,
           py::arg("truncation") = 1.0, py::arg("dimension") = 1)
      .def("__call__", &Nonlinearity::operator(), py::arg("s"))
      .def("derivative", &Nonlinearity::derivative, py::arg("s"))
      .def("antiderivative", [](const Nonlinearity& f, double s) { return Antiderivative(f)(s); }, py::arg("s"))
      .def_property_readonly("name", &Nonlinearity::name)
      .def_property_readonly("p", [](const Nonlinearity& f) { return f.certificate().p; })
      .def_property_readonly("C", [](const Nonlinearity& f) { return f.certificate().C; });

  py::class_<GrowthBoundReport>(m, "GrowthBoundReport")
      .def_readonly("C1", &GrowthBoundReport::C1)
      .def_readonly("C2", &GrowthBoundReport::C2)
      .def_readonly("sign_violation", &GrowthBoundReport::sign_violation)
      .def_readonly("worst_point", &GrowthBoundReport::worst_point)
      .def_property_readonly("max_violation", &GrowthBoundReport::max_violation)
      .def("passed", &GrowthBoundReport::passed, py::arg("relative_slack") = 1e-12, py::arg("sign_slack") = 1e-14);

  py::class_<StraussApprox>(m, "StraussApprox")
      .def(py::init(&make_strauss), py::arg("f"), py::arg("k"))
      .def("__call__", &StraussApprox::operator(), py::arg("s"))
      .def("__call__", [](const StraussApprox& a, const Eigen::VectorXd& s) {
        return s.unaryExpr([&a](double x) { return a(x); }).eval();
      })
      .def("slope", &StraussApprox::slope, py::arg("s"))
      .def("primitive", &StraussApprox::primitive, py::arg("s"))
      .def("breakpoints", &StraussApprox::breakpoints)
      .def("breakpoint_gap", &StraussApprox::breakpoint_gap)
      .def("uniform_error", [](const StraussApprox& a, double M, std::size_t points) { return uniform_error(a, M, points); },
           py::arg("M") = 2.0, py::arg("points") = 10001)
      .def("check_growth_bounds",
           [](const StraussApprox& a, std::size_t points) { return check_growth_bounds(a, growth_bound_grid(a.index(), points)); },
           py::arg("points") = 10000)
      .def_property_readonly("k", &StraussApprox::index);

  m.def(
      "certificate",
      [](const ModelDomain& domain, double q, double p, double C, double lambda) {
        return to_python(certificate_to_json(build_certificate(domain, q, p, C, lambda)));
      },
      py::arg("domain"), py::arg("q") = 0.5, py::arg("p") = 3.0, py::arg("C") = 1.0, py::arg("lam") = 0.0,
      "Solvability certificate (r, lambda_star, rho, n_star, ...) as a dict.");

  py::class_<SpectralSpace, std::shared_ptr<SpectralSpace>>(m, "SpectralSpace")
      .def(py::init([](const ModelDomain& domain, std::size_t size, int refinement) {
             QuadratureSpec spec;
             spec.refinement = refinement;
             return std::make_shared<SpectralSpace>(build_basis(domain, size), spec);
           }),
           py::arg("domain"), py::arg("m"), py::arg("refinement") = 1)
      .def_property_readonly("m", &SpectralSpace::size)
      .def_property_readonly("eigenvalues",
                             [](const SpectralSpace& s) {
                               std::vector<double> out;
                               for (const auto& mode : s.basis().modes()) out.push_back(mode.eigenvalue);
                               return out;
                             })
      .def_property_readonly("nodes_x", [](const SpectralSpace& s) { return s.quadrature().x().nodes; })
      .def("expand", &SpectralSpace::expand, py::arg("xi"))
      .def("project", &SpectralSpace::project, py::arg("g"))
      .def("integrate", &SpectralSpace::integrate, py::arg("g"))
      .def(
          "evaluate",
          [](const SpectralSpace& s, const Eigen::VectorXd& xi, const std::vector<double>& xs, const std::vector<double>& ys) {
            return s.evaluate(xi, xs, ys);
          },
          py::arg("xi"), py::arg("xs"), py::arg("ys") = std::vector<double>{0.0});

  py::class_<ApproxProblem>(m, "Problem")
      .def_property_readonly("lam", [](const ApproxProblem& p) { return p.lambda; })
      .def_property_readonly("q", [](const ApproxProblem& p) { return p.q; })
      .def_property_readonly("n", [](const ApproxProblem& p) { return p.n; })
      .def_property_readonly("radius", &ApproxProblem::radius)
      .def_property_readonly("certified", &ApproxProblem::certified)
      .def("F", [](const ApproxProblem& p, const Eigen::VectorXd& xi) { return assemble_F(p, xi); }, py::arg("xi"))
      .def("energy", [](const ApproxProblem& p, const Eigen::VectorXd& xi) { return energy(p, xi); }, py::arg("xi"));

  m.def(
      "approx_problem",
      [](std::shared_ptr<SpectralSpace> space, const Nonlinearity& f, double q, double lambda, long long n, bool certify) {
        std::optional<Certificate> cert;
        if (certify) cert = build_certificate(space->domain(), q, f.certificate().p, f.certificate().C, lambda);
        return make_approx_problem(space, f, q, lambda, n, cert);
      },
      py::arg("space"), py::arg("f"), py::arg("q"), py::arg("lam"), py::arg("n"), py::arg("certify") = true,
      "Regularized problem with f_n and source 1/n.");
  m.def(
      "limit_problem",
      [](std::shared_ptr<SpectralSpace> space, const Nonlinearity& f, double q, double lambda) {
        return make_limit_problem(space, f, q, lambda);
      },
      py::arg("space"), py::arg("f"), py::arg("q"), py::arg("lam"));

  m.def(
      "solve",
      [](const ApproxProblem& prob, double tolerance, std::optional<Eigen::VectorXd> initial) {
        SolverOptions options;
        options.tolerance = tolerance;
        const auto sol = solve_in_ball(prob, options, initial);
        py::dict out = to_python(solution_to_json(sol));
        out["xi"] = sol.xi;
        return out;
      },
      py::arg("problem"), py::arg("tolerance") = 1e-10, py::arg("initial") = py::none());

  m.def(
      "sphere_check",
      [](const ApproxProblem& prob, int trials, std::uint64_t seed) {
        const auto r = sphere_margin_check(prob, trials, seed);
        py::dict out;
        out["min_pairing"] = r.min_pairing;
        out["rho"] = r.rho;
        out["radius"] = r.radius;
        out["passed"] = r.passed();
        return out;
      },
      py::arg("problem"), py::arg("trials") = 1000, py::arg("seed") = 20240517);

  m.def(
      "reference",
      [](const ModelDomain& domain, double q, std::size_t size) {
        const auto ref = solve_reference(domain, q, size);
        py::dict out = to_python(reference_to_json(ref));
        out["xi"] = ref.xi;
        return out;
      },
      py::arg("domain"), py::arg("q") = 0.5, py::arg("m") = 128,
      "Positive solution of -Δw = w^q by monotone iteration.");

  m.def(
      "pipeline",
      [](const py::dict& config) {
        const auto report = outer_limit(run_config(config));
        py::dict out = to_python(convergence_to_json(report));
        out["final_xi"] = report.final_solution.xi;
        return out;
      },
      py::arg("config"), "Full double-limit run; returns the convergence report as a dict.");

  m.def(
      "run_command",
      [](const std::string& command, const std::filesystem::path& config, std::optional<std::filesystem::path> output) {
        CliCommand cmd;
        cmd.command = command;
        cmd.config = config;
        cmd.output = std::move(output);
        std::ostringstream out, err;
        const int code = run_command(cmd, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("command"), py::arg("config"), py::arg("output") = py::none(),
      "CLI entry point; returns (exit_code, stdout, stderr).");
}

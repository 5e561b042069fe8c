#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fsys/errors.hpp"
#include "fsys/report.hpp"

namespace py = pybind11;
using namespace fsys;

namespace {

Which operator_from_name(const std::string& name) {
    if (name == "T1") return Which::T1;
    if (name == "T1t") return Which::T1Tilde;
    throw DomainError("operator must be 'T1' or 'T1t'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "First-order symmetric positive systems on an interval: axiom checks, "
              "endpoint spectral data, kernel dimensions, and a verification solver";

    py::register_exception<SchemaError>(m, "SchemaError");
    py::register_exception<DomainError>(m, "DomainError");
    py::register_exception<NumericsError>(m, "NumericsError");

    py::class_<FriedrichsProblem>(m, "Problem")
        .def_property_readonly("id", [](const FriedrichsProblem& p) { return p.id; })
        .def_property_readonly("r", &FriedrichsProblem::size)
        .def_property_readonly(
            "interval",
            [](const FriedrichsProblem& p) { return std::make_pair(p.interval().a, p.interval().b); })
        .def("__repr__", [](const FriedrichsProblem& p) {
            return "<fsys.Problem id='" + p.id + "' r=" + std::to_string(p.size()) + ">";
        });

    m.def("load_problem", &load_problem, py::arg("path"), "Read a problem JSON file");
    m.def("parse_problem", &parse_problem, py::arg("json_text"), py::arg("id") = "");
    m.def("load_bundled", &load_bundled, py::arg("name"), "Load one of the compiled-in problems");
    m.def("bundled_names", [] {
        std::vector<std::string> names;
        for (const auto& [name, text] : bundled_problems()) names.push_back(name);
        return names;
    });

    m.def(
        "check_symmetry",
        [](const FriedrichsProblem& p, int n_samples) {
            const SymmetryReport report = check_symmetry(p, n_samples);
            return std::make_tuple(report.ok, report.max_defect);
        },
        py::arg("problem"), py::arg("n_samples") = 257,
        "(ok, max_defect) for the Hermitian-coefficient check");
    m.def("estimate_mu0", &estimate_mu0, py::arg("problem"), py::arg("n_samples") = 257,
          "Half the sampled minimum eigenvalue of B + B* + A', clamped at 0");

    m.def(
        "endpoint_inertias",
        [](const FriedrichsProblem& p) {
            const EndpointPair endpoints = endpoint_analysis(p);
            auto pack = [](const Inertia& inertia) {
                return std::make_tuple(inertia.n_plus, inertia.n_zero, inertia.n_minus);
            };
            return std::make_pair(pack(endpoints.a.inertia), pack(endpoints.b.inertia));
        },
        py::arg("problem"), "((n+, n0, n-) at a, (n+, n0, n-) at b)");

    m.def(
        "kernel_dimensions",
        [](const FriedrichsProblem& p) {
            const KernelDims dims = kernel_dimensions(p);
            return std::make_pair(dims.dim_ker_T1, dims.dim_ker_T1_tilde);
        },
        py::arg("problem"), "(dim ker T1, dim ker T1~) by the endpoint-inertia formula");
    m.def("graph_codimension", py::overload_cast<const FriedrichsProblem&>(&graph_codimension),
          py::arg("problem"));

    m.def(
        "numerical_kernel",
        [](const FriedrichsProblem& p, const std::string& operator_name, const std::vector<int>& grids,
           double svd_tol) {
            const KernelMeasurement measurement =
                numerical_kernel(p, operator_from_name(operator_name), grids, svd_tol);
            return std::make_tuple(measurement.dimension, measurement.conclusive, measurement.nullities);
        },
        py::arg("problem"), py::arg("operator") = "T1",
        py::arg("grids") = std::vector<int>{65, 129, 257}, py::arg("svd_tol") = 1e-8,
        "(dimension, conclusive, discrete nullities) measured on a grid ladder");

    m.def(
        "solve_manufactured",
        [](const FriedrichsProblem& p, int n, const std::string& operator_name) {
            const Which which = operator_from_name(operator_name);
            const BoundaryConditionSpec spec = construct_admissible_pair(p);
            const Interval iv = p.interval();
            const Polynomial bump =
                Polynomial(std::vector<Complex>{{-iv.a * iv.b, 0.0}, {iv.a + iv.b, 0.0}, {-1.0, 0.0}});
            const std::vector<Polynomial> u_exact(static_cast<size_t>(p.size()), bump);
            const std::vector<Polynomial> f = apply_operator_symbolic(p, u_exact, which);

            const DiscreteOperator op = discretize(p, spec, n, which);
            Eigen::MatrixXcd f_mid(p.size(), op.grid.cells());
            for (int j = 0; j < op.grid.cells(); ++j)
                for (int i = 0; i < p.size(); ++i) f_mid(i, j) = f[static_cast<size_t>(i)](op.grid.midpoint(j));
            const SolveResult result = solve_bvp(op, f_mid);

            GridFunction diff = result.u;
            diff.values -= sample_polynomials(u_exact, op.grid).values;
            return std::make_tuple(grid_norm(diff), result.residual, result.residual_ok);
        },
        py::arg("problem"), py::arg("n") = 129, py::arg("operator") = "T1",
        "(error, residual, residual_ok) for the built-in manufactured solution");

    m.def(
        "analyze_json",
        [](const FriedrichsProblem& p) { return report_to_json(analyze(p)); }, py::arg("problem"),
        "Deterministic analysis report as a JSON string");
}

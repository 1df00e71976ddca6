#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ninc/cli.hpp"
#include "ninc/errors.hpp"
#include "ninc/field.hpp"
#include "ninc/kernel.hpp"
#include "ninc/report.hpp"
#include "ninc/sensitivity.hpp"

namespace py = pybind11;
using namespace ninc;

namespace {

Problem make_problem(double sigma1, double sigma2, double p, double e_field, double theta1, int dim) {
    return validate_problem(sigma1, sigma2, p, e_field, theta1, dim);
}

std::vector<std::vector<double>> rows_of(const Matrix& m) {
    std::vector<std::vector<double>> out(m.rows);
    for (std::size_t r = 0; r < m.rows; ++r)
        for (std::size_t c = 0; c < m.cols; ++c) out[r].push_back(m.at(r, c));
    return out;
}

}  // namespace

PYBIND11_MODULE(_ninc, m) {
    m.doc() = "Exact parameters of nonlinear neutral coated inclusions";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<DegenerateGeometry>(m, "DegenerateGeometry", base.ptr());
    py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());
    py::register_exception<InternalInconsistency>(m, "InternalInconsistency", base.ptr());
    py::register_exception<ShapeError>(m, "ShapeError", base.ptr());
    py::register_exception<StepError>(m, "StepError", base.ptr());

    py::class_<Problem>(m, "Problem")
        .def(py::init(&make_problem), py::arg("sigma1"), py::arg("sigma2"), py::arg("p"),
             py::arg("e_field"), py::arg("theta1"), py::arg("dim") = 3)
        .def_readonly("sigma1", &Problem::sigma1)
        .def_readonly("sigma2", &Problem::sigma2)
        .def_readonly("p", &Problem::p)
        .def_readonly("e_field", &Problem::e_field)
        .def_readonly("theta1", &Problem::theta1)
        .def_readonly("dim", &Problem::dim)
        .def_property_readonly("theta2", &Problem::theta2)
        .def("__eq__", [](const Problem& a, const Problem& b) { return a == b; })
        .def("__repr__", [](const Problem& p) {
            std::ostringstream os;
            os.precision(17);
            os << "Problem(sigma1=" << p.sigma1 << ", sigma2=" << p.sigma2 << ", p=" << p.p
               << ", e_field=" << p.e_field << ", theta1=" << p.theta1 << ", dim=" << p.dim << ")";
            return os.str();
        });

    py::class_<SolverConfig>(m, "SolverConfig")
        .def(py::init([](std::optional<double> abs_tol, std::optional<double> x_tol, int max_iter) {
                 SolverConfig c{abs_tol, x_tol, max_iter};
                 c.validate();
                 return c;
             }),
             py::arg("abs_tol") = py::none(), py::arg("x_tol") = py::none(), py::arg("max_iter") = 200)
        .def_readonly("abs_tol", &SolverConfig::abs_tol)
        .def_readonly("x_tol", &SolverConfig::x_tol)
        .def_readonly("max_iter", &SolverConfig::max_iter);

    py::class_<GeometryFactors>(m, "GeometryFactors")
        .def_readonly("a_coef", &GeometryFactors::a_coef)
        .def_readonly("b_coef", &GeometryFactors::b_coef);

    py::class_<Root>(m, "Root")
        .def_readonly("x0", &Root::x0)
        .def_readonly("core_field", &Root::core_field)
        .def_readonly("residual", &Root::residual)
        .def_readonly("bracket_lo", &Root::bracket_lo)
        .def_readonly("bracket_hi", &Root::bracket_hi)
        .def_readonly("iterations", &Root::iterations);

    py::enum_<Branch>(m, "Branch")
        .value("GeneralRoot", Branch::GeneralRoot)
        .value("AllNonlinear", Branch::AllNonlinear)
        .value("AllLinear", Branch::AllLinear)
        .value("LinearClosedForm", Branch::LinearClosedForm);

    py::class_<EffectiveResult>(m, "EffectiveResult")
        .def_readonly("sigma_star", &EffectiveResult::sigma_star)
        .def_readonly("x0", &EffectiveResult::x0)
        .def_readonly("hs_value", &EffectiveResult::hs_value)
        .def_readonly("branch", &EffectiveResult::branch);

    py::class_<HsBounds>(m, "HsBounds")
        .def_readonly("lower", &HsBounds::lower)
        .def_readonly("upper", &HsBounds::upper);

    py::class_<Coefficients>(m, "Coefficients")
        .def_readonly("a1", &Coefficients::a1)
        .def_readonly("a2", &Coefficients::a2)
        .def_readonly("b2", &Coefficients::b2)
        .def_readonly("r_c", &Coefficients::r_c)
        .def_readonly("r_e", &Coefficients::r_e);

    py::class_<FieldSolution>(m, "FieldSolution")
        .def_readonly("coeffs", &FieldSolution::coeffs)
        .def_readonly("prob", &FieldSolution::prob)
        .def_readonly("sigma_star", &FieldSolution::sigma_star);

    py::class_<PointSample>(m, "PointSample")
        .def_readonly("r", &PointSample::r)
        .def_readonly("theta", &PointSample::theta)
        .def_readonly("u", &PointSample::u)
        .def_readonly("grad_r", &PointSample::grad_r)
        .def_readonly("grad_theta", &PointSample::grad_theta);

    py::class_<EnergyReport>(m, "EnergyReport")
        .def_readonly("core_dissipation", &EnergyReport::core_dissipation)
        .def_readonly("coating_dissipation", &EnergyReport::coating_dissipation)
        .def_readonly("homogeneous_dissipation", &EnergyReport::homogeneous_dissipation)
        .def_readonly("rel_error", &EnergyReport::rel_error);

    py::class_<SensitivityReport>(m, "SensitivityReport")
        .def_readonly("dx0_dp", &SensitivityReport::dx0_dp)
        .def_readonly("dsigma_dp", &SensitivityReport::dsigma_dp)
        .def_readonly("dx0_dtheta", &SensitivityReport::dx0_dtheta)
        .def_readonly("dsigma_dtheta", &SensitivityReport::dsigma_dtheta)
        .def_readonly("fd_dx0_dp", &SensitivityReport::fd_dx0_dp)
        .def_readonly("fd_dsigma_dp", &SensitivityReport::fd_dsigma_dp)
        .def_readonly("fd_dx0_dtheta", &SensitivityReport::fd_dx0_dtheta)
        .def_readonly("fd_dsigma_dtheta", &SensitivityReport::fd_dsigma_dtheta)
        .def_readonly("max_rel_mismatch", &SensitivityReport::max_rel_mismatch);

    py::enum_<Regime>(m, "Regime")
        .value("Increasing", Regime::Increasing)
        .value("Decreasing", Regime::Decreasing)
        .value("Flat", Regime::Flat);

    py::class_<RegimeVerdict>(m, "RegimeVerdict")
        .def_readonly("threshold_verdict", &RegimeVerdict::threshold_verdict)
        .def_readonly("numeric_verdict", &RegimeVerdict::numeric_verdict)
        .def_readonly("consistent", &RegimeVerdict::consistent)
        .def_readonly("threshold", &RegimeVerdict::threshold)
        .def_readonly("dx0_dp", &RegimeVerdict::dx0_dp);

    const SolverConfig defaults{};

    m.def("geometry_factors", &geometry_factors, py::arg("prob"));
    m.def("interface_fn", &interface_fn, py::arg("x"), py::arg("prob"), py::arg("gf"));
    m.def("solve_root", &solve_root, py::arg("prob"), py::arg("cfg") = defaults);
    m.def("effective_conductivity", &effective_conductivity, py::arg("prob"), py::arg("cfg") = defaults);
    m.def("hashin_shtrikman", &hashin_shtrikman, py::arg("prob"));
    m.def("hs_bounds", &hs_bounds, py::arg("prob"));

    m.def("build_field", &build_field, py::arg("prob"), py::arg("r_e"), py::arg("cfg") = defaults);
    m.def("eval_field", &eval_field, py::arg("sol"), py::arg("r"), py::arg("theta"));
    m.def("residuals", &residuals, py::arg("sol"));
    m.def("harmonicity_check", &harmonicity_check, py::arg("sol"), py::arg("n_points"), py::arg("h"));
    m.def("energy_identity", &energy_identity, py::arg("sol"), py::arg("quad_order"));
    m.def("scale_invariance_check", &scale_invariance_check, py::arg("prob"), py::arg("r_e"),
          py::arg("lam"), py::arg("cfg") = defaults);

    m.def("dx0_dp", &dx0_dp, py::arg("prob"), py::arg("root"));
    m.def("dsigma_dp", &dsigma_dp, py::arg("prob"), py::arg("root"));
    m.def("dx0_dtheta", &dx0_dtheta, py::arg("prob"), py::arg("root"));
    m.def("dsigma_dtheta", &dsigma_dtheta, py::arg("prob"), py::arg("root"));
    m.def("regime_classify", &regime_classify, py::arg("prob"), py::arg("cfg") = defaults);
    m.def("full_report", &full_report, py::arg("prob"), py::arg("cfg") = defaults,
          py::arg("fd_step") = 1e-6);

    m.def(
        "generate_table",
        [](int table_id, int workers) {
            return rows_of(generate_table(standard_table_spec(table_id), {}, workers));
        },
        py::arg("table_id"), py::arg("workers") = 1,
        "Reference table 1..6 as a list of rows (theta1) of columns (p).");
    m.def(
        "golden_diff",
        [](int table_id) {
            const GoldenDiff d = golden_diff(generate_table(standard_table_spec(table_id)), table_id);
            auto pack = [](const std::vector<DiffRow>& rows) {
                py::list out;
                for (const auto& r : rows)
                    out.append(py::dict(py::arg("theta1") = r.theta1, py::arg("p") = r.p,
                                        py::arg("computed") = r.computed,
                                        py::arg("golden") = r.golden_text, py::arg("delta") = r.delta));
                return out;
            };
            return py::make_tuple(pack(d.mismatches), pack(d.notes));
        },
        py::arg("table_id"), "(mismatches, guarded) for a regenerated reference table.");
    m.def(
        "sweep",
        [](const std::string& axis, double lo, double hi, int n, const Problem& fixed,
           const std::vector<std::string>& quantities, int workers) {
            SweepSpec spec;
            if (axis == "p") spec.axis = SweepSpec::Axis::P;
            else if (axis == "theta1") spec.axis = SweepSpec::Axis::Theta1;
            else throw DomainError("axis must be p or theta1");
            spec.lo = lo;
            spec.hi = hi;
            spec.n_points = n;
            spec.fixed = fixed;
            spec.quantities.clear();
            for (const auto& q : quantities) spec.quantities.push_back(parse_quantity(q));
            const Dataset d = sweep(spec, {}, workers);
            return py::make_tuple(d.columns, d.rows);
        },
        py::arg("axis"), py::arg("lo"), py::arg("hi"), py::arg("n"), py::arg("fixed"),
        py::arg("quantities") = std::vector<std::string>{"sigma"}, py::arg("workers") = 1,
        "(columns, rows) along an inclusive linear grid.");
    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            const int code = cli::run(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command-line front end in process: (exit code, stdout, stderr).");
}

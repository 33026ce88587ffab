#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "renyi/constants.hpp"
#include "renyi/density.hpp"
#include "renyi/density_spec.hpp"
#include "renyi/errors.hpp"
#include "renyi/functionals.hpp"
#include "renyi/heatflow.hpp"
#include "renyi/profiles.hpp"
#include "renyi/special_functions.hpp"
#include "renyi/verify.hpp"

namespace py = pybind11;
using namespace renyi;
using release = py::call_guard<py::gil_scoped_release>;

namespace {

py::dict constant_dict(const ConstantRecord& r) {
    py::dict d;
    d["alpha"] = r.alpha;
    d["n"] = r.n;
    d["value"] = r.value;
    d["route"] = std::string(route_name(r.route));
    d["limit_scaled"] = r.limit_scaled ? py::object(py::float_(*r.limit_scaled)) : py::object(py::none());
    d["metadata"] = r.metadata;
    return d;
}

FunctionalKind kind_from_name(const std::string& name) {
    for (int k = 0; k <= static_cast<int>(FunctionalKind::sigma2); ++k)
        if (functional_name(static_cast<FunctionalKind>(k)) == name) return static_cast<FunctionalKind>(k);
    throw InputError("unknown functional '" + name + "'");
}

VerifyOptions options(double tol_quad, double tol_fd) {
    VerifyOptions o;
    if (tol_quad > 0) o.tol.closed_vs_quad = o.tol.quad_vs_quad = tol_quad;
    if (tol_fd > 0) {
        o.tol.fd_second *= tol_fd / o.tol.fd_first;
        o.tol.fd_first = tol_fd;
    }
    return o;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Renyi entropies, Fisher informations and their sharp inequalities";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ConditionError>(m, "ConditionError", PyExc_ValueError);
    py::register_exception<UnsupportedRegion>(m, "UnsupportedRegion", PyExc_ValueError);
    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

    m.def("log_gamma", &log_gamma);
    m.def("nagy_w", &nagy_w);
    m.def("gamma_ratio_gap", &gamma_ratio_gap_check);

    m.def("optimal_constant", [](int n, double alpha) { return constant_dict(optimal_constant(n, alpha)); },
          py::arg("n"), py::arg("alpha"));
    m.def("gaussian_isoperimetric_value", &gaussian_isoperimetric_value);
    m.def("weighted_isoperimetric_constant", &weighted_isoperimetric_constant);
    m.def("omega_bounds_1d", &omega_bounds_1d);
    m.def("cm_bound_coefficients", &cm_bound_coefficients, py::arg("alpha"), py::arg("beta"), py::arg("j"),
          py::arg("t"), py::arg("K"));
    m.def("log_tsallis_cm_bound", &log_tsallis_cm_bound, py::arg("K"), py::arg("t"), py::arg("j"));

    py::class_<Density, std::shared_ptr<Density>>(m, "Density")
        .def_property_readonly("dim", &Density::dim)
        .def_property_readonly("family", [](const Density& d) { return std::string(family_name(d.family())); })
        .def_property_readonly("params", &Density::params)
        .def("describe", &Density::describe)
        .def("__repr__", &Density::describe)
        .def("value", [](const Density& d, const Eigen::VectorXd& x) { return d.value(x); })
        .def("gradient", [](const Density& d, const Eigen::VectorXd& x) { return d.gradient(x); })
        .def("mean", [](const Density& d) { return mean(d); })
        .def("covariance", [](const Density& d) { return covariance(d); })
        .def("second_moment", [](const Density& d) { return second_moment(d); });

    // shared_ptr<const Density> crosses as shared_ptr<Density>
    auto to_py = [](DensityPtr p) { return std::const_pointer_cast<Density>(p); };
    m.def("density", [to_py](const std::string& spec, int dim) { return to_py(parse_density_spec(spec, dim)); },
          py::arg("spec"), py::arg("dim") = 1);
    m.def("grid_density", [to_py](double x0, double h, std::vector<double> p) { return to_py(make_grid_1d(x0, h, p)); },
          py::arg("x0"), py::arg("h"), py::arg("values"));
    m.def("parse_sweep", &parse_sweep);

    m.def("functional",
          [](const Density& d, const std::string& kind, double order) -> py::object {
              FunctionalValue v;
              {
                  py::gil_scoped_release nogil;
                  v = evaluate_functional(d, kind_from_name(kind), order);
              }
              if (v.matrix) return py::cast(*v.matrix);
              return py::float_(v.value);
          },
          py::arg("density"), py::arg("kind"), py::arg("order"));
    m.def("renyi_entropy", [](const Density& d, double a) { return renyi_entropy(d, a); }, release());
    m.def("renyi_power", [](const Density& d, double a) { return renyi_power(d, a); }, release());
    m.def("renyi_fisher", [](const Density& d, double a) { return renyi_fisher(d, a); }, release());
    m.def("tsallis_fisher", [](const Density& d, double a) { return tsallis_fisher(d, a); }, release());
    m.def("weighted_fisher", [](const Density& d, double a) { return weighted_fisher(d, a); }, release());

    m.def("solve_profile", [](int n, double alpha) {
        ProfileSolution s;
        {
            py::gil_scoped_release nogil;
            s = solve_profile(n, alpha);
        }
        std::vector<double> t, u, du;
        for (const auto& nd : s.samples()) {
            t.push_back(nd.t);
            u.push_back(nd.u);
            du.push_back(nd.du);
        }
        py::dict d;
        d["n"] = s.n;
        d["alpha"] = s.alpha;
        d["u0"] = s.u0;
        d["T"] = s.T ? py::object(py::float_(*s.T)) : py::object(py::none());
        d["Ms"] = s.Ms;
        d["case"] = std::string(profile_case_name(s.kind));
        d["t"] = t;
        d["u"] = u;
        d["uprime"] = du;
        return d;
    });

    py::class_<FlowTrace>(m, "FlowTrace")
        .def_readonly("alpha", &FlowTrace::alpha)
        .def_readonly("t", &FlowTrace::t)
        .def_readonly("h", &FlowTrace::h)
        .def_readonly("N", &FlowTrace::N)
        .def_readonly("I", &FlowTrace::I)
        .def_readonly("dh_dt_fd", &FlowTrace::dh_dt_fd)
        .def_readonly("d2N_dt2_fd", &FlowTrace::d2N_dt2_fd)
        .def_readonly("residual", &FlowTrace::residual)
        .def_readonly("fd_gap", &FlowTrace::fd_gap);
    m.def("heat_trace",
          [](const std::shared_ptr<Density>& d, std::vector<double> alphas, std::vector<double> ts, double h) {
              auto g = std::dynamic_pointer_cast<const GridDensity>(d);
              GridPtr grid = g ? g : sample_grid(*d, h);
              return trace_orders(*grid, alphas, ts);
          },
          py::arg("density"), py::arg("alphas"), py::arg("t_grid"), py::arg("h") = 0.02, release());

    py::class_<VerdictReport>(m, "VerdictReport")
        .def_readonly("inequality_id", &VerdictReport::inequality_id)
        .def_readonly("anchor", &VerdictReport::anchor)
        .def_readonly("inputs", &VerdictReport::inputs)
        .def_readonly("labels", &VerdictReport::labels)
        .def_readonly("lhs", &VerdictReport::lhs)
        .def_readonly("rhs", &VerdictReport::rhs)
        .def_readonly("margin", &VerdictReport::margin)
        .def_readonly("passed", &VerdictReport::pass)
        .def_readonly("tolerance", &VerdictReport::tolerance)
        .def_readonly("equality_expected", &VerdictReport::equality_expected)
        .def_readonly("eigenvalues", &VerdictReport::eigenvalues)
        .def_readonly("details", &VerdictReport::details)
        .def_readonly("notes", &VerdictReport::notes)
        .def("equality_met", &VerdictReport::equality_met)
        .def("__repr__", [](const VerdictReport& r) {
            return "<VerdictReport " + r.inequality_id + " pass=" + (r.pass ? "True" : "False") + ">";
        });

    using Check = VerdictReport (*)(const DensityPtr&, double, const VerifyOptions&);
    const std::pair<const char*, Check> checks[] = {
        {"isoperimetric_check", &isoperimetric_check},
        {"cramer_rao_renyi", &cramer_rao_renyi},
        {"cramer_rao_weighted", &cramer_rao_weighted},
        {"cramer_rao_weighted_chain", &cramer_rao_weighted_chain},
        {"weighted_isoperimetric_check", &weighted_isoperimetric_check},
        {"moment_entropy_check", &moment_entropy_check},
        {"cramer_rao_tsallis", &cramer_rao_tsallis},
        {"cramer_rao_matrix", &cramer_rao_matrix},
    };
    for (const auto& [name, fn] : checks)
        m.def(name,
              [fn](const std::shared_ptr<Density>& d, double alpha, double tol_quad, double tol_fd) {
                  return fn(d, alpha, options(tol_quad, tol_fd));
              },
              py::arg("density"), py::arg("alpha"), py::arg("tol_quad") = 0.0, py::arg("tol_fd") = 0.0, release());

    m.def("cm_bound_check",
          [](const std::shared_ptr<Density>& d, double alpha, std::optional<double> beta, int j, double t0) {
              return cm_bound_check(d, alpha, beta, j, t0);
          },
          py::arg("density"), py::arg("alpha"), py::arg("beta") = py::none(), py::arg("j") = 1, py::arg("t0") = 0.5,
          release());
    m.def("log_tsallis_cm_check",
          [](const std::shared_ptr<Density>& d, double t0, int j) { return log_tsallis_cm_check(d, t0, j); },
          py::arg("density"), py::arg("t0") = 0.5, py::arg("j") = 1, release());
    m.def("bell_polynomials", [](const std::vector<double>& x) { return bell_polynomials(x).values; });
    m.def("run_suite",
          [](const std::string& name, const std::shared_ptr<Density>& d, double alpha) {
              return run_suite(name, d, alpha);
          },
          py::arg("name"), py::arg("density"), py::arg("alpha"), release());
    m.def("suite_names", &suite_names);
}

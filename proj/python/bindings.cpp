#include "llhyst/experiment.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace llhyst;

namespace {

py::array_t<double> to_array(std::span<const double> v) {
    py::array_t<double> a(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), a.mutable_data());
    return a;
}

py::dict trajectory_dict(const Trajectory& t) {
    py::dict d;
    d["t"] = to_array(t.times());
    d["u"] = to_array(t.inputs());
    d["y"] = to_array(t.samples());
    return d;
}

py::dict metrics_dict(double omega, const hyst::LoopMetrics& m) {
    py::dict d;
    d["omega"] = omega;
    d["area"] = m.area;
    d["normalized_area"] = m.normalized_area;
    d["width"] = m.width;
    d["height"] = m.height;
    d["closure_gap"] = m.closure_gap;
    d["degenerate"] = m.degenerate;
    return d;
}

hyst::IOCurve curve_from(const std::vector<double>& u, const std::vector<double>& y) {
    if (u.size() != y.size()) throw PreconditionError("u and y must have the same length");
    hyst::IOCurve c;
    for (std::size_t i = 0; i < u.size(); ++i) c.points.push_back({u[i], y[i]});
    return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Input-output hysteresis experiments on spring ODEs and the Landau-Lifshitz equation";

    // Translators are tried newest first, so the base class goes in first.
    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<exp::SpecError>(m, "SpecError", PyExc_ValueError);
    py::register_exception<StabilityError>(m, "StabilityError", PyExc_ValueError);

    py::class_<exp::ExperimentSpec>(m, "Spec")
        .def_static("from_yaml", &exp::parse_spec, py::arg("text"))
        .def_static("load", [](const std::string& path) { return exp::load_spec(path); }, py::arg("path"))
        .def_static("preset", [](const std::string& name) { return exp::parse_spec(exp::preset_text(name)); },
                    py::arg("name"))
        .def("to_yaml", &exp::serialize_spec)
        .def_readwrite("name", &exp::ExperimentSpec::name)
        .def_property_readonly("system", [](const exp::ExperimentSpec& s) { return hyst::to_string(s.system); })
        .def_readwrite("sweep", &exp::ExperimentSpec::sweep)
        .def_property(
            "dt", [](const exp::ExperimentSpec& s) { return s.integrator.dt; },
            [](exp::ExperimentSpec& s, std::optional<double> dt) { s.integrator.dt = dt; })
        .def("__repr__", [](const exp::ExperimentSpec& s) {
            return "<Spec " + s.name + " (" + hyst::to_string(s.system) + ")>";
        });

    m.def(
        "simulate",
        [](const exp::ExperimentSpec& spec, std::optional<double> omega) {
            spec.validate();
            std::optional<exp::SimulationOutput> out;
            {
                py::gil_scoped_release release;
                out = omega ? exp::simulate_at(spec, *omega) : exp::run_simulate(spec);
            }
            return trajectory_dict(out->trajectory);
        },
        py::arg("spec"), py::arg("omega") = py::none(),
        "Trajectory {t, u, y} at omega, or at the single sweep frequency.");

    m.def(
        "sweep",
        [](const exp::ExperimentSpec& spec, std::size_t jobs) {
            exp::SweepOutput out;
            {
                py::gil_scoped_release release;
                out = exp::run_sweep(spec, jobs);
            }
            py::list rows;
            for (const auto& e : out.result.entries) rows.append(metrics_dict(e.omega, e.metrics));
            py::dict d;
            d["verdict"] = hyst::to_string(out.result.verdict);
            d["rows"] = rows;
            return d;
        },
        py::arg("spec"), py::arg("jobs") = 1);

    m.def("spectrum", [](const exp::ExperimentSpec& spec) {
        auto out = exp::run_spectrum(spec);
        py::list rows;
        for (const auto& mm : out.matches) {
            py::dict r;
            r["mode"] = mm.mode;
            r["analytic"] = mm.analytic;
            r["numeric"] = mm.numeric;
            r["abs_error"] = mm.abs_error;
            rows.append(r);
        }
        py::dict d;
        d["rows"] = rows;
        d["max_real_part"] = out.max_real_part;
        d["kernel_dimension"] = out.kernel_dimension;
        return d;
    });

    m.def(
        "verify",
        [](double analytic_nu_scale, double guard_dt_factor) {
            std::vector<std::tuple<std::string, bool, std::string>> rows;
            for (const auto& c : exp::run_verify({analytic_nu_scale, guard_dt_factor})) {
                rows.emplace_back(c.name, c.passed, c.detail);
            }
            return rows;
        },
        py::arg("analytic_nu_scale") = 1.0, py::arg("guard_dt_factor") = 2.0);

    m.def(
        "loop_area", [](const std::vector<double>& u, const std::vector<double>& y) {
            return hyst::loop_area(curve_from(u, y));
        },
        py::arg("u"), py::arg("y"), "Signed area, positive for counterclockwise traversal.");

    m.def(
        "loop_metrics",
        [](const std::vector<double>& u, const std::vector<double>& y) {
            return metrics_dict(0.0, hyst::loop_metrics(curve_from(u, y)));
        },
        py::arg("u"), py::arg("y"));

    m.def("census", [](const std::string& system) {
        hyst::SystemDescriptor d;
        d.kind = hyst::parse_system_kind(system);
        if (d.kind == hyst::SystemKind::NonlinearSpring) {
            d.ode.k = -1.0;
            d.ode.cubic = true;
        }
        if (d.kind == hyst::SystemKind::IntegratorChain) d.ode.k = 0.0;
        auto c = hyst::equilibrium_census(d);
        py::dict r;
        r["count"] = ode::to_string(c.count);
        r["stable_points"] = c.stable_points;
        r["continuum_stable"] = c.continuum_stable;
        r["multiple_stable"] = c.multiple_stable;
        return r;
    });

    m.def("preset_names", &exp::preset_names);
    m.def("format_number", &exp::format_number);
    m.def("version", &exp::version);
}

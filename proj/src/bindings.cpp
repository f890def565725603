// Python bindings for the hammerflow core library.
#include "hammerflow/config.hpp"
#include "hammerflow/errors.hpp"
#include "hammerflow/forward_solver.hpp"
#include "hammerflow/objective.hpp"
#include "hammerflow/optimizer.hpp"
#include "hammerflow/time_scaling.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace hammerflow;

PYBIND11_MODULE(_hammerflow, mod) {
    mod.doc() = "Optimal valve-closure scheduling for water-hammer suppression";

    py::register_exception<ConfigError>(mod, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericsError>(mod, "NumericsError", PyExc_ArithmeticError);
    py::register_exception<GridMismatchError>(mod, "GridMismatchError", PyExc_ValueError);
    py::register_exception<OptimError>(mod, "OptimError", PyExc_RuntimeError);

    py::class_<PipelineConfig>(mod, "PipelineConfig")
        .def(py::init<>())
        .def_readwrite("L", &PipelineConfig::L)
        .def_readwrite("D", &PipelineConfig::D)
        .def_readwrite("rho", &PipelineConfig::rho)
        .def_readwrite("c", &PipelineConfig::c)
        .def_readwrite("f", &PipelineConfig::f)
        .def_readwrite("P", &PipelineConfig::P)
        .def_readwrite("P_bar", &PipelineConfig::P_bar)
        .def_readwrite("gamma", &PipelineConfig::gamma)
        .def_readwrite("u_max", &PipelineConfig::u_max)
        .def_readwrite("T", &PipelineConfig::T)
        .def("validate", &PipelineConfig::validate);

    py::class_<DiscretizationConfig>(mod, "DiscretizationConfig")
        .def(py::init<>())
        .def_readwrite("N", &DiscretizationConfig::N)
        .def_readwrite("r", &DiscretizationConfig::r)
        .def_readwrite("M", &DiscretizationConfig::M)
        .def_readwrite("theta_min", &DiscretizationConfig::theta_min)
        .def("validate", &DiscretizationConfig::validate);

    py::class_<ControlParams>(mod, "ControlParams")
        .def(py::init<>())
        .def_readwrite("sigma1", &ControlParams::sigma1)
        .def_readwrite("sigma2", &ControlParams::sigma2)
        .def_readwrite("theta", &ControlParams::theta)
        .def("segments", &ControlParams::segments);

    py::class_<GridSeries>(mod, "GridSeries", py::buffer_protocol())
        .def_readonly("rows", &GridSeries::rows)
        .def_readonly("cols", &GridSeries::cols)
        .def("at", [](const GridSeries& g, int i, int j) { return g(i, j); })
        .def_buffer([](GridSeries& g) {
            return py::buffer_info(
                g.data.data(), sizeof(double), py::format_descriptor<double>::format(),
                2, {static_cast<py::ssize_t>(g.rows), static_cast<py::ssize_t>(g.cols)},
                {static_cast<py::ssize_t>(sizeof(double)),
                 static_cast<py::ssize_t>(sizeof(double) * g.rows)});
        });

    py::class_<StateTrajectory>(mod, "StateTrajectory")
        .def_readonly("s_grid", &StateTrajectory::s_grid)
        .def_readonly("p", &StateTrajectory::p)
        .def_readonly("v", &StateTrajectory::v)
        .def_readonly("params_used", &StateTrajectory::params_used);

    py::class_<ConstraintResiduals>(mod, "ConstraintResiduals")
        .def_readonly("continuity", &ConstraintResiduals::continuity)
        .def_readonly("initial", &ConstraintResiduals::initial)
        .def_readonly("terminal", &ConstraintResiduals::terminal)
        .def_readonly("total_time", &ConstraintResiduals::total_time)
        .def("max_scaled", &ConstraintResiduals::max_scaled);

    py::class_<GradientBundle>(mod, "GradientBundle")
        .def_readonly("J", &GradientBundle::J)
        .def_readonly("grad_sigma1", &GradientBundle::grad_sigma1)
        .def_readonly("grad_sigma2", &GradientBundle::grad_sigma2)
        .def_readonly("grad_theta", &GradientBundle::grad_theta)
        .def_readonly("residuals", &GradientBundle::residuals);

    py::enum_<OptimStatus>(mod, "OptimStatus")
        .value("converged", OptimStatus::converged)
        .value("max_iters", OptimStatus::max_iters)
        .value("line_search_failure", OptimStatus::line_search_failure);

    py::class_<OptimOptions>(mod, "OptimOptions")
        .def(py::init<>())
        .def_readwrite("max_iters", &OptimOptions::max_iters)
        .def_readwrite("tol_obj", &OptimOptions::tol_obj)
        .def_readwrite("tol_constraint", &OptimOptions::tol_constraint)
        .def_readwrite("penalty_init", &OptimOptions::penalty_init)
        .def_readwrite("penalty_growth", &OptimOptions::penalty_growth)
        .def_readwrite("ls_shrink", &OptimOptions::ls_shrink)
        .def_readwrite("ls_c1", &OptimOptions::ls_c1);

    py::class_<HistoryRow>(mod, "HistoryRow")
        .def_readonly("iter", &HistoryRow::iter)
        .def_readonly("J", &HistoryRow::J)
        .def_readonly("residual_max", &HistoryRow::residual_max)
        .def_readonly("step", &HistoryRow::step);

    py::class_<OptimResult>(mod, "OptimResult")
        .def_readonly("params", &OptimResult::params)
        .def_readonly("J", &OptimResult::J)
        .def_readonly("residual_max", &OptimResult::residual_max)
        .def_readonly("history", &OptimResult::history)
        .def_readonly("status", &OptimResult::status);

    mod.def("load_config", &load_config, py::arg("path"));
    mod.def("parse_config", &parse_config, py::arg("text"));
    mod.def("serialize_config", &serialize_config);
    mod.def("load_params", &load_params, py::arg("path"), py::arg("r"));
    mod.def("serialize_params", &serialize_params);
    mod.def("validate_params", &validate_params);
    mod.def("default_theta_min", &default_theta_min);

    mod.def("time_map", [](double s, const std::vector<double>& theta) {
        return time_map(s, theta);
    });
    mod.def("inverse_time_map", [](double t, const std::vector<double>& theta) {
        return inverse_time_map(t, theta);
    });
    mod.def("control_value", &control_value);
    mod.def("control_value_physical", &control_value_physical);
    mod.def("constraint_residuals", &constraint_residuals);

    mod.def("simulate", &simulate, py::arg("cfg"), py::arg("disc"), py::arg("params"));
    mod.def("objective", &objective);
    mod.def("gradient", &gradient);
    mod.def("evaluate", &evaluate);
    mod.def("fd_gradient", &fd_gradient, py::arg("cfg"), py::arg("disc"),
            py::arg("params"), py::arg("h") = 1e-5);

    mod.def("initial_guess", &initial_guess);
    mod.def("optimize", &optimize, py::arg("cfg"), py::arg("disc"), py::arg("init"),
            py::arg("opts") = OptimOptions{});
    mod.def("optimize_fixed_grid", &optimize_fixed_grid, py::arg("cfg"),
            py::arg("disc"), py::arg("init"), py::arg("opts") = OptimOptions{});
}

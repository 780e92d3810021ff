#include <optional>
#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mgres/advset/advset.hpp"
#include "mgres/dispatch/dispatch.hpp"
#include "mgres/lp/solver.hpp"
#include "mgres/robust/robust.hpp"
#include "mgres/scenario/cli.hpp"
#include "mgres/scenario/outputs.hpp"
#include "mgres/scenario/scenario.hpp"
#include "mgres/sim/simulate.hpp"
#include "mgres/util/errors.hpp"

namespace py = pybind11;
using namespace mgres;

namespace {

// Results cross the boundary as JSON text; the Python side parses them.
struct LpResult {
    std::string status;
    double objective = 0.0;
    std::vector<double> x;
    std::vector<std::size_t> certificate_rows;
};

// min c.x  s.t. rows a_i.x (<=, ==, >=) b_i, lb <= x <= ub
LpResult solve_lp(const std::vector<double>& c, const std::vector<std::vector<double>>& a,
                  const std::vector<std::string>& sense, const std::vector<double>& b, const std::vector<double>& lb,
                  const std::vector<double>& ub) {
    const std::size_t n = c.size();
    if (lb.size() != n || ub.size() != n) throw InputError("solve_lp", "bounds must have one entry per variable");
    if (a.size() != b.size() || a.size() != sense.size())
        throw InputError("solve_lp", "a, sense and b need one entry per row");
    lp::LinearProgram prob;
    for (std::size_t j = 0; j < n; ++j) {
        prob.add_variable("x" + std::to_string(j), lb[j], ub[j]);
        prob.set_objective(j, c[j]);
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].size() != n) throw InputError("solve_lp", "row " + std::to_string(i) + " has the wrong length");
        std::vector<lp::Term> t;
        for (std::size_t j = 0; j < n; ++j)
            if (a[i][j] != 0.0) t.push_back({j, a[i][j]});
        lp::Relation rel;
        if (sense[i] == "<=") rel = lp::Relation::LessEqual;
        else if (sense[i] == "==" || sense[i] == "=") rel = lp::Relation::Equal;
        else if (sense[i] == ">=") rel = lp::Relation::GreaterEqual;
        else throw InputError("solve_lp", "sense must be <=, == or >=");
        prob.add_row("r" + std::to_string(i), std::move(t), rel, b[i]);
    }
    const auto s = lp::solve(prob);
    return {lp::to_string(s.status), s.objective_value, s.values, s.certificate_rows};
}

scenario::Overrides overrides(std::optional<std::uint64_t> seed, std::optional<int> sides, std::optional<double> tol) {
    return {seed, sides, tol};
}

robust::RobustResult plan_of(const scenario::Scenario& sc) {
    return robust::solve_robust(sc.model, sc.costs, sc.reserve_costs, sc.box(), sc.options);
}

std::string baseline_json(const scenario::Scenario& sc) {
    const auto r = dispatch::solve_baseline(sc.model, sc.costs, sc.options.base);
    return scenario::dispatch_json(sc.model, r).dump();
}

std::string robust_json(const scenario::Scenario& sc) {
    return scenario::robust_json(sc.model, plan_of(sc)).dump();
}

std::string advset_json(const scenario::Scenario& sc) {
    const auto plan = plan_of(sc);
    if (!plan.optimal()) throw InputError("advset", "the robust plan is infeasible");
    const auto poly = advset::characterize(sc.model, plan, sc.axes, sc.axis_caps(), sc.adv_options());
    return scenario::polytope_json(poly, "").dump();
}

std::string simulate_json(const scenario::Scenario& sc) {
    const auto plan = plan_of(sc);
    if (!plan.optimal()) throw InputError("simulate", "the robust plan is infeasible");
    const auto tr = sim::run_simulation(sc.model, plan, sc.timeline, {sc.sim_tol});
    auto j = scenario::summary_json(sim::violation_report(tr));
    j["trajectory_csv"] = scenario::trajectory_csv(sc.model, tr);
    return j.dump();
}

py::tuple cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int rc = scenario::run_cli(args, out, err);
    return py::make_tuple(rc, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "mgres native core";
    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);

    py::class_<LpResult>(m, "LpResult")
        .def_readonly("status", &LpResult::status)
        .def_readonly("objective", &LpResult::objective)
        .def_readonly("x", &LpResult::x)
        .def_readonly("certificate_rows", &LpResult::certificate_rows);
    m.def("solve_lp", &solve_lp, py::arg("c"), py::arg("a"), py::arg("sense"), py::arg("b"), py::arg("lb"),
          py::arg("ub"));

    py::class_<scenario::Scenario>(m, "Scenario")
        .def_readonly("name", &scenario::Scenario::name)
        .def_readonly("seed", &scenario::Scenario::seed)
        .def_readonly("inputs", &scenario::Scenario::inputs)
        .def_property_readonly("steps", [](const scenario::Scenario& s) { return s.model.steps; })
        .def_property_readonly("dt_minutes", [](const scenario::Scenario& s) { return s.model.dt_minutes; })
        .def_property_readonly("buses", [](const scenario::Scenario& s) {
            std::vector<std::string> ids;
            for (const auto& b : s.model.buses) ids.push_back(b.id);
            return ids;
        })
        .def_property_readonly("axes", [](const scenario::Scenario& s) {
            std::vector<std::string> l;
            for (const auto& a : s.axes) l.push_back(a.label());
            return l;
        });
    m.def(
        "load_scenario",
        [](const std::string& path, std::optional<std::uint64_t> seed, std::optional<int> poly_sides,
           std::optional<double> feas_tol) {
            return scenario::load_scenario(path, overrides(seed, poly_sides, feas_tol));
        },
        py::arg("path"), py::arg("seed") = py::none(), py::arg("poly_sides") = py::none(),
        py::arg("feas_tol") = py::none());

    m.def("_baseline", &baseline_json, py::call_guard<py::gil_scoped_release>());
    m.def("_robust", &robust_json, py::call_guard<py::gil_scoped_release>());
    m.def("_advset", &advset_json, py::call_guard<py::gil_scoped_release>());
    m.def("_simulate", &simulate_json, py::call_guard<py::gil_scoped_release>());
    m.def("run_cli", &cli, py::arg("args"), "Runs the command line; returns (exit code, stdout, stderr).");
}

#pragma once

#include <array>
#include <string>
#include <vector>

#include "mgres/flow/constraints.hpp"
#include "mgres/flow/namespace.hpp"
#include "mgres/grid/network.hpp"
#include "mgres/lp/solver.hpp"

namespace mgres::dispatch {

using PhaseVec = std::array<double, 3>;

// Objective weights per MW of DG output, PV curtailment and load curtailment.
struct CostConfig {
    double c1 = 1.0;
    double c2 = 0.1;
    double c3 = 10.0;
    void validate() const;
};

struct DispatchOptions {
    flow::FlowOptions flow;
    lp::SolverOptions solver;
};

struct DeviceSchedule {
    std::string id;
    grid::PhaseSet phases;
    std::vector<PhaseVec> p;  // W per phase, per step
    std::vector<PhaseVec> q;  // var
    double total_p(int k) const { return p[k][0] + p[k][1] + p[k][2]; }
    double total_q(int k) const { return q[k][0] + q[k][1] + q[k][2]; }
};

struct DispatchResult {
    lp::SolveStatus status = lp::SolveStatus::Infeasible;
    double objective = 0.0;                 // MW-weighted, see CostConfig
    std::vector<std::string> certificate;   // row names when infeasible
    int first_step = 0;
    int steps = 0;

    std::vector<DeviceSchedule> pv, dg, es, load;
    std::vector<std::vector<double>> soc_wh;        // per unit, steps + 1
    std::vector<std::vector<PhaseVec>> w;           // per bus, per step (pu^2)
    std::vector<std::vector<PhaseVec>> pflow, qflow;  // per branch, per step (W, var)
    std::vector<std::vector<double>> pv_curt_w;     // forecast minus dispatch, per unit and step
    std::vector<std::vector<double>> load_curt_w;   // desired minus served

    std::vector<double> raw;  // LP column values, namespace order

    bool optimal() const { return status == lp::SolveStatus::Optimal; }
};

// The assembled baseline LP, exposed for debugging dumps.
struct BaselineProblem {
    flow::VariableNamespace ns;
    lp::LinearProgram lp;
};

BaselineProblem build_baseline(const grid::NetworkModel& model, const CostConfig& costs,
                               const DispatchOptions& opt = {});
DispatchResult solve_baseline(const grid::NetworkModel& model, const CostConfig& costs,
                              const DispatchOptions& opt = {});

// Adds c1 Pdg + c2 (forecast - Ppv) + c3 (desired - Pload) over the window,
// with forecast/desired taken from `param` (pu totals).
void add_energy_objective(lp::LinearProgram& lp, const grid::NetworkModel& model, const flow::VariableNamespace& ns,
                          const CostConfig& costs, const std::function<double(flow::ParamId)>& param);

// Converts an LP solution into typed setpoints (SI units).
DispatchResult extract_result(const grid::NetworkModel& model, const flow::VariableNamespace& ns,
                              const lp::LinearProgram& lp, const lp::LpSolution& sol);

struct AggregateSeries {
    std::vector<double> minute;
    std::vector<double> pv_w, dg_w, es_w, generation_w, load_w;
    std::vector<double> pv_curt_w, load_curt_w;
    std::vector<double> v_min_pu, v_max_pu;  // voltage magnitude
    std::vector<double> soc_wh;              // total stored energy at the end of each step
};

AggregateSeries summarize(const grid::NetworkModel& model, const DispatchResult& result);

}  // namespace mgres::dispatch

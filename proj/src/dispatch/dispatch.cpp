#include "mgres/dispatch/dispatch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mgres/grid/validate.hpp"
#include "mgres/util/errors.hpp"

namespace mgres::dispatch {

using flow::ParamId;
using flow::ParamKind;

void CostConfig::validate() const {
    if (!(c1 >= 0) || !(c2 >= 0) || !(c3 >= 0)) throw InputError("costs", "cost weights must be >= 0");
}

void add_energy_objective(lp::LinearProgram& lp, const grid::NetworkModel& m, const flow::VariableNamespace& ns,
                          const CostConfig& c, const std::function<double(ParamId)>& param) {
    double offset = lp.objective_offset();
    for (int k = ns.first_step(); k < ns.end_step(); ++k) {
        for (int d = 0; d < static_cast<int>(m.dg.size()); ++d)
            for (int ph : m.dg[d].phases.list()) lp.add_objective(ns.pdg(d, ph, k), c.c1);
        for (int d = 0; d < static_cast<int>(m.pv.size()); ++d) {
            offset += c.c2 * param({ParamKind::PvForecast, d, k});
            for (int ph : m.pv[d].phases.list()) lp.add_objective(ns.ppv(d, ph, k), -c.c2);
        }
        for (int d = 0; d < static_cast<int>(m.loads.size()); ++d) {
            offset += c.c3 * param({ParamKind::LoadDesired, d, k});
            for (int ph : m.loads[d].phases.list()) lp.add_objective(ns.pload(d, ph, k), -c.c3);
        }
    }
    lp.set_objective_offset(offset);
}

BaselineProblem build_baseline(const grid::NetworkModel& m, const CostConfig& costs, const DispatchOptions& opt) {
    grid::require_valid(m);
    costs.validate();
    BaselineProblem p{flow::VariableNamespace(m), {}};
    p.ns.declare(p.lp);
    flow::lower_nominal(p.lp, flow::emit_all(m, p.ns, opt.flow), m);
    add_energy_objective(p.lp, m, p.ns, costs, [&](ParamId id) { return flow::nominal_param(m, id); });
    return p;
}

DispatchResult extract_result(const grid::NetworkModel& m, const flow::VariableNamespace& ns,
                              const lp::LinearProgram& lp, const lp::LpSolution& sol) {
    DispatchResult r;
    r.status = sol.status;
    r.first_step = ns.first_step();
    r.steps = ns.num_steps();
    if (!sol.optimal()) {
        for (auto i : sol.certificate_rows) r.certificate.push_back(lp.row(i).name);
        return r;
    }
    r.objective = sol.objective_value;
    r.raw = sol.values;
    const double s = m.base.s_va();
    const auto& x = sol.values;
    const int K = ns.num_steps(), k0 = ns.first_step();

    auto device = [&](const std::string& id, grid::PhaseSet ph, auto pidx, auto qidx) {
        DeviceSchedule ds{id, ph, std::vector<PhaseVec>(K), std::vector<PhaseVec>(K)};
        for (int t = 0; t < K; ++t)
            for (int p : ph.list()) {
                ds.p[t][p] = x[pidx(p, k0 + t)] * s;
                ds.q[t][p] = x[qidx(p, k0 + t)] * s;
            }
        return ds;
    };
    for (int d = 0; d < static_cast<int>(m.pv.size()); ++d)
        r.pv.push_back(device(m.pv[d].id, m.pv[d].phases, [&](int p, int k) { return ns.ppv(d, p, k); },
                              [&](int p, int k) { return ns.qpv(d, p, k); }));
    for (int d = 0; d < static_cast<int>(m.dg.size()); ++d)
        r.dg.push_back(device(m.dg[d].id, m.dg[d].phases, [&](int p, int k) { return ns.pdg(d, p, k); },
                              [&](int p, int k) { return ns.qdg(d, p, k); }));
    for (int d = 0; d < static_cast<int>(m.storage.size()); ++d)
        r.es.push_back(device(m.storage[d].id, m.storage[d].phases, [&](int p, int k) { return ns.pes(d, p, k); },
                              [&](int p, int k) { return ns.qes(d, p, k); }));
    for (int d = 0; d < static_cast<int>(m.loads.size()); ++d)
        r.load.push_back(device(m.loads[d].id, m.loads[d].phases, [&](int p, int k) { return ns.pload(d, p, k); },
                                [&](int p, int k) { return ns.qload(d, p, k); }));
    for (int d = 0; d < static_cast<int>(m.storage.size()); ++d) {
        std::vector<double> e(K + 1);
        for (int t = 0; t <= K; ++t) e[t] = x[ns.soc(d, k0 + t)] * s;
        r.soc_wh.push_back(std::move(e));
    }
    r.w.assign(m.buses.size(), std::vector<PhaseVec>(K));
    for (int b = 0; b < static_cast<int>(m.buses.size()); ++b)
        for (int t = 0; t < K; ++t)
            for (int p : m.buses[b].phases.list()) r.w[b][t][p] = x[ns.w(b, p, k0 + t)];
    r.pflow.assign(m.branches.size(), std::vector<PhaseVec>(K));
    r.qflow.assign(m.branches.size(), std::vector<PhaseVec>(K));
    for (int l = 0; l < static_cast<int>(m.branches.size()); ++l)
        for (int t = 0; t < K; ++t)
            for (int p : m.branches[l].phases.list()) {
                r.pflow[l][t][p] = x[ns.pflow(l, p, k0 + t)] * s;
                r.qflow[l][t][p] = x[ns.qflow(l, p, k0 + t)] * s;
            }
    // round-off from the pu round trip reads as zero
    auto gap = [](double avail, double used) {
        const double g = avail - used;
        return std::abs(g) <= 1e-9 * std::max(1.0, std::abs(avail)) ? 0.0 : g;
    };
    for (int d = 0; d < static_cast<int>(m.pv.size()); ++d) {
        std::vector<double> c(K);
        for (int t = 0; t < K; ++t) c[t] = gap(m.pv[d].forecast_w[k0 + t], r.pv[d].total_p(t));
        r.pv_curt_w.push_back(std::move(c));
    }
    for (int d = 0; d < static_cast<int>(m.loads.size()); ++d) {
        std::vector<double> c(K);
        for (int t = 0; t < K; ++t) c[t] = gap(m.loads[d].p_des_w[k0 + t], r.load[d].total_p(t));
        r.load_curt_w.push_back(std::move(c));
    }
    return r;
}

DispatchResult solve_baseline(const grid::NetworkModel& m, const CostConfig& costs, const DispatchOptions& opt) {
    auto p = build_baseline(m, costs, opt);
    auto sol = lp::solve(p.lp, opt.solver);
    return extract_result(m, p.ns, p.lp, sol);
}

AggregateSeries summarize(const grid::NetworkModel& m, const DispatchResult& r) {
    if (!r.optimal()) throw std::logic_error("summarize needs an optimal dispatch");
    AggregateSeries a;
    for (int t = 0; t < r.steps; ++t) {
        const int k = r.first_step + t;
        a.minute.push_back(m.step_minute(k));
        double pv = 0, dg = 0, es = 0, ld = 0, pvc = 0, ldc = 0, soc = 0;
        for (const auto& d : r.pv) pv += d.total_p(t);
        for (const auto& d : r.dg) dg += d.total_p(t);
        for (const auto& d : r.es) es += d.total_p(t);
        for (const auto& d : r.load) ld += d.total_p(t);
        for (const auto& c : r.pv_curt_w) pvc += c[t];
        for (const auto& c : r.load_curt_w) ldc += c[t];
        for (const auto& e : r.soc_wh) soc += e[t + 1];
        double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
        for (int b = 0; b < static_cast<int>(m.buses.size()); ++b)
            for (int p : m.buses[b].phases.list()) {
                const double v = std::sqrt(std::max(0.0, r.w[b][t][p]));
                vmin = std::min(vmin, v);
                vmax = std::max(vmax, v);
            }
        a.pv_w.push_back(pv);
        a.dg_w.push_back(dg);
        a.es_w.push_back(es);
        a.generation_w.push_back(pv + dg + es);
        a.load_w.push_back(ld);
        a.pv_curt_w.push_back(pvc);
        a.load_curt_w.push_back(ldc);
        a.v_min_pu.push_back(vmin);
        a.v_max_pu.push_back(vmax);
        a.soc_wh.push_back(soc);
    }
    return a;
}

}  // namespace mgres::dispatch

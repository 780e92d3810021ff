#include "mgres/sim/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "mgres/flow/sweep.hpp"
#include "mgres/grid/validate.hpp"

namespace mgres::sim {

const char* to_string(ViolationClass c) {
    static const char* n[] = {"voltage", "soc", "line", "device", "balance"};
    return n[static_cast<int>(c)];
}

int ViolationSummary::total() const {
    int s = 0;
    for (int c : count) s += c;
    return s;
}

ViolationSummary violation_report(const Trajectory& traj) {
    ViolationSummary s;
    for (const auto& v : traj.violations) {
        const int i = static_cast<int>(v.cls);
        ++s.count[i];
        s.max[i] = std::max(s.max[i], v.amount);
    }
    return s;
}

namespace {

std::string tag(const std::string& id, int ph) { return id + "." + static_cast<char>('a' + ph); }

double hyp(double p, double q) { return std::sqrt(p * p + q * q); }

struct Checker {
    Trajectory& tr;
    int k;
    double tol;  // SI
    void over(ViolationClass c, const std::string& ent, double amount) {
        if (amount > tol) tr.violations.push_back({c, k, ent, amount});
    }
};

}  // namespace

Trajectory run_simulation(const grid::NetworkModel& m, const robust::RobustResult& plan, const EventTimeline& tl,
                          const SimOptions& opt) {
    grid::require_valid(m);
    if (!plan.optimal()) throw std::logic_error("simulation needs an optimal plan");
    const auto& sched = plan.dispatch;
    const auto windows = event_windows(m, tl);
    const auto topo = grid::build_topology(m);
    const double S = m.base.s_va();
    const double dt = m.dt_hours();
    const auto order = pool_order(m);

    Trajectory tr;
    for (const auto& d : order) {
        switch (d.cls) {
            case DeviceClass::Pv: tr.device_ids.push_back(m.pv[d.index].id); break;
            case DeviceClass::Dg: tr.device_ids.push_back(m.dg[d.index].id); break;
            case DeviceClass::Es: tr.device_ids.push_back(m.storage[d.index].id); break;
            case DeviceClass::Load: tr.device_ids.push_back(m.loads[d.index].id); break;
        }
    }

    std::vector<double> soc;
    for (const auto& e : sched.soc_wh) soc.push_back(e.at(0));

    for (int t = 0; t < sched.steps; ++t) {
        const int k = sched.first_step + t;
        const auto dist = disturbance_at(m, sched, windows, k);
        const auto real = realize_step(m, sched, plan.reserves, t, dist);

        StepRecord rec;
        rec.step = k;
        rec.minute = m.step_minute(k);
        rec.imbalance_w = real.imbalance;
        rec.pool_w = real.pool;
        rec.delivered_w = real.delivered;
        rec.shortfall_w = real.shortfall;
        rec.deploy_w = real.deploy;
        for (const auto& d : sched.pv) rec.scheduled_gen_w += d.total_p(t);
        for (const auto& d : sched.dg) rec.scheduled_gen_w += d.total_p(t);
        for (const auto& d : sched.es) rec.scheduled_gen_w += d.total_p(t);
        for (double v : dist.dg_loss) rec.gen_loss_w += v;
        for (double v : dist.pv_loss) rec.gen_loss_w += v;
        for (double v : dist.load_delta) rec.load_delta_w += v;

        auto sum = [](const PhaseVec& p) { return p[0] + p[1] + p[2]; };
        std::vector<flow::PhaseVec> pin(m.buses.size(), flow::PhaseVec{}), qin(m.buses.size(), flow::PhaseVec{});
        auto inject = [&](const std::string& bus, grid::PhaseSet ph, const PhaseVec& p, const PhaseVec& q, double s) {
            const int b = m.bus_index(bus);
            for (int i : ph.list()) {
                pin[b][i] += s * p[i] / S;
                qin[b][i] += s * q[i] / S;
            }
        };
        for (std::size_t i = 0; i < m.pv.size(); ++i) {
            rec.pv_w += sum(real.pv_p[i]);
            inject(m.pv[i].bus, m.pv[i].phases, real.pv_p[i], real.pv_q[i], 1.0);
        }
        for (std::size_t i = 0; i < m.dg.size(); ++i) {
            rec.dg_w += sum(real.dg_p[i]);
            inject(m.dg[i].bus, m.dg[i].phases, real.dg_p[i], real.dg_q[i], 1.0);
        }
        for (std::size_t i = 0; i < m.storage.size(); ++i) {
            const double p = sum(real.es_p[i]);
            rec.es_w += p;
            rec.es_p_w.push_back(p);
            inject(m.storage[i].bus, m.storage[i].phases, real.es_p[i], real.es_q[i], 1.0);
        }
        for (std::size_t i = 0; i < m.loads.size(); ++i) {
            rec.demand_w += sum(real.load_p[i]);
            inject(m.loads[i].bus, m.loads[i].phases, real.load_p[i], real.load_q[i], -1.0);
        }
        rec.realized_gen_w = rec.pv_w + rec.dg_w + rec.es_w;
        rec.served_load_w = rec.demand_w - (real.imbalance > 0 ? real.shortfall : 0.0);

        const auto fs = flow::linear_flow(m, topo, pin, qin);
        rec.exchange_w = (fs.xp[0] + fs.xp[1] + fs.xp[2]) * S;
        rec.w = fs.w;
        rec.v_min = 1e300;
        rec.v_max = -1e300;
        for (std::size_t b = 0; b < m.buses.size(); ++b)
            for (int ph : m.buses[b].phases.list()) {
                const double v = std::sqrt(std::max(0.0, fs.w[b][ph]));
                rec.v_min = std::min(rec.v_min, v);
                rec.v_max = std::max(rec.v_max, v);
            }

        rec.soc_start_wh = soc;
        for (std::size_t i = 0; i < m.storage.size(); ++i) soc[i] -= dt * rec.es_p_w[i];
        rec.soc_end_wh = soc;

        Checker c{tr, k, opt.tol * S};
        Checker cv{tr, k, opt.tol};
        for (std::size_t b = 0; b < m.buses.size(); ++b) {
            if (static_cast<int>(b) == topo.root) continue;
            const auto& B = m.buses[b];
            for (int ph : B.phases.list()) {
                cv.over(ViolationClass::Voltage, tag(B.id, ph), B.v_min * B.v_min - fs.w[b][ph]);
                cv.over(ViolationClass::Voltage, tag(B.id, ph), fs.w[b][ph] - B.v_max * B.v_max);
            }
        }
        for (std::size_t l = 0; l < m.branches.size(); ++l) {
            const auto& br = m.branches[l];
            for (int ph : br.phases.list())
                c.over(ViolationClass::Line, tag(br.id, ph),
                       hyp(fs.pflow[l][ph], fs.qflow[l][ph]) * S - br.flow_limit_va);
        }
        for (std::size_t i = 0; i < m.pv.size(); ++i) {
            const auto& u = m.pv[i];
            const double n = u.phases.count();
            const double avail = (u.forecast_w.at(k) - dist.pv_loss[i]) / n;
            for (int ph : u.phases.list()) {
                const double p = real.pv_p[i][ph], q = real.pv_q[i][ph];
                c.over(ViolationClass::Device, tag(u.id, ph), -p);
                c.over(ViolationClass::Device, tag(u.id, ph), p - avail);
                c.over(ViolationClass::Device, tag(u.id, ph), hyp(p, q) - u.capacity_va / n);
            }
        }
        for (std::size_t i = 0; i < m.dg.size(); ++i) {
            const auto& u = m.dg[i];
            const double n = u.phases.count();
            const double cap = std::max(0.0, u.capacity_va - dist.dg_cap_loss[i]) / n;
            for (int ph : u.phases.list()) {
                const double p = real.dg_p[i][ph], q = real.dg_q[i][ph];
                c.over(ViolationClass::Device, tag(u.id, ph), -p);
                c.over(ViolationClass::Device, tag(u.id, ph), hyp(p, q) - cap);
            }
        }
        for (std::size_t i = 0; i < m.storage.size(); ++i) {
            const auto& u = m.storage[i];
            const double n = u.phases.count();
            for (int ph : u.phases.list()) {
                const double p = real.es_p[i][ph], q = real.es_q[i][ph];
                c.over(ViolationClass::Device, tag(u.id, ph), std::abs(p) - u.power_w / n);
                c.over(ViolationClass::Device, tag(u.id, ph), hyp(p, q) - u.capacity_va / n);
            }
            c.over(ViolationClass::Soc, u.id, u.energy_min_wh - soc[i]);
            c.over(ViolationClass::Soc, u.id, soc[i] - u.energy_max_wh);
        }
        for (std::size_t i = 0; i < m.loads.size(); ++i) {
            const auto& u = m.loads[i];
            const double n = u.phases.count();
            for (int ph : u.phases.list()) {
                const double p = real.load_p[i][ph];
                c.over(ViolationClass::Device, tag(u.id, ph), u.p_min_w.at(k) / n - p);
                c.over(ViolationClass::Device, tag(u.id, ph), p - (u.p_des_w.at(k) + dist.load_delta[i]) / n);
            }
        }
        c.over(ViolationClass::Balance, "system", real.shortfall);
        tr.steps.push_back(std::move(rec));
    }
    return tr;
}

}  // namespace mgres::sim

#include "mgres/sim/controller.hpp"

#include <cmath>

namespace mgres::sim {

Deployment proportional_dispatch(double imbalance, std::span<const double> caps) {
    Deployment d;
    d.amount.assign(caps.size(), 0.0);
    double total = 0.0;
    for (double c : caps) {
        if (c < 0) throw std::invalid_argument("reserve capacity must be >= 0");
        total += c;
    }
    if (!(imbalance > 0)) return d;
    if (total <= 0) {
        d.shortfall = imbalance;
        return d;
    }
    const double served = std::min(imbalance, total);
    for (std::size_t i = 0; i < caps.size(); ++i) d.amount[i] = caps[i] / total * served;
    d.delivered = served;
    d.shortfall = imbalance - served;
    return d;
}

StepDisturbance StepDisturbance::none(const grid::NetworkModel& m) {
    StepDisturbance s;
    s.dg_loss.assign(m.dg.size(), 0.0);
    s.dg_cap_loss.assign(m.dg.size(), 0.0);
    s.pv_loss.assign(m.pv.size(), 0.0);
    s.load_delta.assign(m.loads.size(), 0.0);
    s.dg_impaired.assign(m.dg.size(), 0);
    s.pv_impaired.assign(m.pv.size(), 0);
    s.load_impaired.assign(m.loads.size(), 0);
    return s;
}

double StepDisturbance::imbalance() const {
    double s = 0.0;
    for (double v : dg_loss) s += v;
    for (double v : pv_loss) s += v;
    for (double v : load_delta) s += v;
    return s;
}

std::vector<DeviceRef> pool_order(const grid::NetworkModel& m) {
    std::vector<DeviceRef> v;
    for (int i = 0; i < static_cast<int>(m.pv.size()); ++i) v.push_back({DeviceClass::Pv, i});
    for (int i = 0; i < static_cast<int>(m.dg.size()); ++i) v.push_back({DeviceClass::Dg, i});
    for (int i = 0; i < static_cast<int>(m.storage.size()); ++i) v.push_back({DeviceClass::Es, i});
    for (int i = 0; i < static_cast<int>(m.loads.size()); ++i) v.push_back({DeviceClass::Load, i});
    return v;
}

double reserve_of(const robust::ReserveSchedule& r, DeviceRef d, int t, bool up) {
    const std::vector<std::vector<double>>* v = nullptr;
    switch (d.cls) {
        case DeviceClass::Pv: v = up ? &r.pv_up : &r.pv_dn; break;
        case DeviceClass::Dg: v = up ? &r.dg_up : &r.dg_dn; break;
        case DeviceClass::Es: v = up ? &r.es_up : &r.es_dn; break;
        case DeviceClass::Load: v = up ? &r.load_up : &r.load_dn; break;
    }
    // a plain dispatch carries no reserve schedule at all
    if (v->empty()) return 0.0;
    return std::max(0.0, v->at(d.index).at(t));
}

namespace {

void spread(PhaseVec& p, grid::PhaseSet ph, double total) {
    const double share = total / ph.count();
    for (int i : ph.list()) p[i] += share;
}

}  // namespace

RealizedStep realize_step(const grid::NetworkModel& m, const dispatch::DispatchResult& sched,
                          const robust::ReserveSchedule& rsv, int t, const StepDisturbance& dist) {
    RealizedStep r;
    for (const auto& d : sched.pv) r.pv_p.push_back(d.p.at(t)), r.pv_q.push_back(d.q.at(t));
    for (const auto& d : sched.dg) r.dg_p.push_back(d.p.at(t)), r.dg_q.push_back(d.q.at(t));
    for (const auto& d : sched.es) r.es_p.push_back(d.p.at(t)), r.es_q.push_back(d.q.at(t));
    for (const auto& d : sched.load) r.load_p.push_back(d.p.at(t)), r.load_q.push_back(d.q.at(t));

    for (std::size_t i = 0; i < m.dg.size(); ++i) spread(r.dg_p[i], m.dg[i].phases, -dist.dg_loss.at(i));
    for (std::size_t i = 0; i < m.pv.size(); ++i) spread(r.pv_p[i], m.pv[i].phases, -dist.pv_loss.at(i));
    for (std::size_t i = 0; i < m.loads.size(); ++i) spread(r.load_p[i], m.loads[i].phases, dist.load_delta.at(i));

    r.imbalance = dist.imbalance();
    const bool up = r.imbalance >= 0;
    const auto order = pool_order(m);
    std::vector<double> caps(order.size(), 0.0);
    for (std::size_t j = 0; j < order.size(); ++j) {
        const auto& d = order[j];
        bool bad = false;
        if (d.cls == DeviceClass::Pv) bad = dist.pv_impaired.at(d.index);
        if (d.cls == DeviceClass::Dg) bad = dist.dg_impaired.at(d.index);
        if (d.cls == DeviceClass::Load) bad = dist.load_impaired.at(d.index);
        if (!bad) caps[j] = reserve_of(rsv, d, t, up);
        r.pool += caps[j];
    }
    auto dep = proportional_dispatch(std::abs(r.imbalance), caps);
    r.delivered = dep.delivered;
    r.shortfall = dep.shortfall;
    const double sign = up ? 1.0 : -1.0;
    r.deploy.resize(order.size());
    for (std::size_t j = 0; j < order.size(); ++j) {
        const double a = sign * dep.amount[j];
        r.deploy[j] = a;
        if (a == 0.0) continue;
        const auto& d = order[j];
        switch (d.cls) {
            case DeviceClass::Pv: spread(r.pv_p[d.index], m.pv[d.index].phases, a); break;
            case DeviceClass::Dg: spread(r.dg_p[d.index], m.dg[d.index].phases, a); break;
            case DeviceClass::Es: spread(r.es_p[d.index], m.storage[d.index].phases, a); break;
            case DeviceClass::Load: spread(r.load_p[d.index], m.loads[d.index].phases, -a); break;
        }
    }
    return r;
}

}  // namespace mgres::sim

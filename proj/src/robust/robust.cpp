#include "mgres/robust/robust.hpp"

#include <algorithm>
#include <cmath>

#include "mgres/grid/validate.hpp"
#include "mgres/util/errors.hpp"

namespace mgres::robust {

using flow::VarKind;

UncertaintyBox::UncertaintyBox(const grid::NetworkModel& m) : scale_(m.base.s_va()) {
    for (int k = 0; k < m.steps; ++k) {
        for (int d = 0; d < static_cast<int>(m.dg.size()); ++d) {
            const ParamId id{ParamKind::DgCapacity, d, k};
            const double v = flow::nominal_param(m, id);
            box_[id] = {v, v, v};
        }
        for (int d = 0; d < static_cast<int>(m.loads.size()); ++d) {
            const ParamId id{ParamKind::LoadDesired, d, k};
            const double v = flow::nominal_param(m, id);
            box_[id] = {v, v, v};
        }
        for (int d = 0; d < static_cast<int>(m.pv.size()); ++d) {
            const ParamId id{ParamKind::PvForecast, d, k};
            const double v = flow::nominal_param(m, id);
            box_[id] = {v, v, v};
        }
    }
}

const Interval& UncertaintyBox::at(ParamId id) const {
    auto it = box_.find(id);
    if (it == box_.end())
        throw InputError("box", std::string("no interval for ") + flow::to_string(id.kind) + " entity " +
                                    std::to_string(id.entity) + " step " + std::to_string(id.step));
    return it->second;
}

void UncertaintyBox::set(ParamId id, double lo, double hi) {
    auto it = box_.find(id);
    if (it == box_.end()) throw InputError("box", "parameter outside the model");
    const double nom = it->second.nom;
    // a little slack for values that went through a unit conversion
    const double eps = 1e-12 * std::max(1.0, std::abs(nom));
    if (!(lo <= nom + eps && nom <= hi + eps) || !std::isfinite(lo) || !std::isfinite(hi))
        throw InputError("box", std::string(flow::to_string(id.kind)) + " interval must satisfy lo <= nominal <= hi");
    it->second.lo = std::min(lo, nom);
    it->second.hi = std::max(hi, nom);
}

double UncertaintyBox::max_of(ParamId id, double b) const {
    const auto& iv = at(id);
    return b > 0 ? b * iv.hi : b * iv.lo;
}

double UncertaintyBox::min_of(ParamId id, double b) const {
    const auto& iv = at(id);
    return b > 0 ? b * iv.lo : b * iv.hi;
}

bool UncertaintyBox::degenerate() const {
    for (const auto& [id, iv] : box_)
        if (iv.width() > 0) return false;
    return true;
}

bool impaired(const UncertaintyBox& box, ParamKind kind, int entity, int k) {
    const ParamId id{kind, entity, k};
    return box.contains(id) && box.at(id).width() > 0;
}

flow::ConstraintBlock tighten(const flow::ConstraintBlock& rows, const UncertaintyBox& box) {
    flow::ConstraintBlock out;
    out.rows.reserve(rows.rows.size());
    for (const auto& fr : rows.rows) {
        flow::FlowRow r{fr.row, fr.tag, {}};
        if (!fr.params.empty() && fr.row.relation == lp::Relation::Equal) throw UncertainEqualityRow(fr.row.name);
        for (const auto& pt : fr.params) {
            if (pt.coef == 0.0) continue;
            r.row.rhs -= fr.row.relation == lp::Relation::LessEqual ? box.max_of(pt.id, pt.coef)
                                                                     : box.min_of(pt.id, pt.coef);
        }
        out.rows.push_back(std::move(r));
    }
    return out;
}

void ReserveCosts::validate() const {
    if (!(dg >= 0) || !(pv >= 0) || !(es >= 0) || !(load >= 0))
        throw InputError("reserve_costs", "reserve prices must be >= 0");
}

RobustProblem build_robust(const grid::NetworkModel& m, const dispatch::CostConfig& costs, const ReserveCosts& rc,
                           const UncertaintyBox& box, const RobustOptions& opt) {
    grid::require_valid(m);
    costs.validate();
    rc.validate();
    flow::NamespaceOptions nso;
    nso.reserves = true;
    RobustProblem p{flow::VariableNamespace(m, nso), {}, {}, {}};
    auto& ns = p.ns;
    auto& lp = p.lp;
    ns.declare(lp);
    const int K0 = ns.first_step(), K1 = ns.end_step();
    auto each_reserve = [&](auto&& fn) {
        for (int k = K0; k < K1; ++k) {
            for (int d = 0; d < static_cast<int>(m.pv.size()); ++d) {
                fn(VarKind::RpvUp, d, k, rc.pv, impaired(box, ParamKind::PvForecast, d, k));
                fn(VarKind::RpvDn, d, k, rc.pv, impaired(box, ParamKind::PvForecast, d, k));
            }
            for (int d = 0; d < static_cast<int>(m.dg.size()); ++d) {
                fn(VarKind::RdgUp, d, k, rc.dg, impaired(box, ParamKind::DgCapacity, d, k));
                fn(VarKind::RdgDn, d, k, rc.dg, impaired(box, ParamKind::DgCapacity, d, k));
            }
            for (int d = 0; d < static_cast<int>(m.storage.size()); ++d) {
                fn(VarKind::ResUp, d, k, rc.es, false);
                fn(VarKind::ResDn, d, k, rc.es, false);
            }
            for (int d = 0; d < static_cast<int>(m.loads.size()); ++d) {
                fn(VarKind::RloadUp, d, k, rc.load, impaired(box, ParamKind::LoadDesired, d, k));
                fn(VarKind::RloadDn, d, k, rc.load, impaired(box, ParamKind::LoadDesired, d, k));
            }
        }
    };
    each_reserve([&](VarKind kind, int d, int k, double price, bool) {
        const auto j = ns.reserve(kind, d, k);
        lp.set_bounds(j, 0.0, lp::kInf);
        lp.set_objective(j, price);
    });

    flow::lower_nominal(lp, tighten(flow::emit_all(m, ns, opt.base.flow), box), m);

    // Adequacy: healthy devices must hold enough reserve for the worst
    // demand swing of the uncertain loads.
    const int K = ns.num_steps();
    p.required_up.assign(K, 0.0);
    p.required_dn.assign(K, 0.0);
    for (int k = K0; k < K1; ++k)
        for (int d = 0; d < static_cast<int>(m.loads.size()); ++d) {
            const auto& iv = box.at({ParamKind::LoadDesired, d, k});
            p.required_up[k - K0] += iv.hi - iv.nom;
            p.required_dn[k - K0] += iv.nom - iv.lo;
        }
    std::vector<std::vector<lp::Term>> up(K), dn(K);
    each_reserve([&](VarKind kind, int d, int k, double, bool bad) {
        if (bad) return;
        const bool is_up = kind == VarKind::RpvUp || kind == VarKind::RdgUp || kind == VarKind::ResUp ||
                           kind == VarKind::RloadUp;
        (is_up ? up : dn)[k - K0].push_back({ns.reserve(kind, d, k), 1.0});
    });
    for (int k = K0; k < K1; ++k) {
        lp.add_row("rsvup[" + std::to_string(k) + "]", up[k - K0], lp::Relation::GreaterEqual, p.required_up[k - K0]);
        lp.add_row("rsvdn[" + std::to_string(k) + "]", dn[k - K0], lp::Relation::GreaterEqual, p.required_dn[k - K0]);
    }

    dispatch::add_energy_objective(lp, m, ns, costs, [&](ParamId id) {
        return opt.worst_case_objective ? box.at(id).hi : box.at(id).nom;
    });
    return p;
}

namespace {

std::vector<std::vector<double>> series(const flow::VariableNamespace& ns, const std::vector<double>& x, VarKind kind,
                                        int units, double s) {
    std::vector<std::vector<double>> out(units, std::vector<double>(ns.num_steps()));
    for (int d = 0; d < units; ++d)
        for (int k = ns.first_step(); k < ns.end_step(); ++k) out[d][k - ns.first_step()] = x[ns.reserve(kind, d, k)] * s;
    return out;
}

}  // namespace

RobustResult solve_robust(const grid::NetworkModel& m, const dispatch::CostConfig& costs, const ReserveCosts& rc,
                          const UncertaintyBox& box, const RobustOptions& opt) {
    auto p = build_robust(m, costs, rc, box, opt);
    auto sol = lp::solve(p.lp, opt.base.solver);
    RobustResult r;
    r.dispatch = dispatch::extract_result(m, p.ns, p.lp, sol);
    const double s = m.base.s_va();
    for (double v : p.required_up) r.required_up.push_back(v * s);
    for (double v : p.required_dn) r.required_dn.push_back(v * s);
    if (!sol.optimal()) return r;

    const auto& x = sol.values;
    auto& R = r.reserves;
    R.pv_up = series(p.ns, x, VarKind::RpvUp, m.pv.size(), s);
    R.pv_dn = series(p.ns, x, VarKind::RpvDn, m.pv.size(), s);
    R.dg_up = series(p.ns, x, VarKind::RdgUp, m.dg.size(), s);
    R.dg_dn = series(p.ns, x, VarKind::RdgDn, m.dg.size(), s);
    R.es_up = series(p.ns, x, VarKind::ResUp, m.storage.size(), s);
    R.es_dn = series(p.ns, x, VarKind::ResDn, m.storage.size(), s);
    R.load_up = series(p.ns, x, VarKind::RloadUp, m.loads.size(), s);
    R.load_dn = series(p.ns, x, VarKind::RloadDn, m.loads.size(), s);

    r.objective = sol.objective_value;
    double rsv = 0.0;
    const auto& c = p.lp.objective();
    for (int kind = static_cast<int>(VarKind::RpvUp); kind <= static_cast<int>(VarKind::RloadDn); ++kind) {
        const auto vk = static_cast<VarKind>(kind);
        if (p.ns.count(vk) == 0) continue;
        const std::size_t first = p.ns.at(vk, 0, 0, p.ns.first_step());
        for (std::size_t j = first; j < first + p.ns.count(vk); ++j) rsv += c[j] * x[j];
    }
    r.reserve_objective = rsv;
    r.energy_objective = r.objective - rsv;
    return r;
}

RobustResult without_reserves(const dispatch::DispatchResult& d) {
    RobustResult r;
    r.dispatch = d;
    r.objective = r.energy_objective = d.objective;
    r.required_up.assign(d.steps, 0.0);
    r.required_dn.assign(d.steps, 0.0);
    return r;
}

std::pair<double, double> reserve_margin(const RobustResult& r, int k) {
    if (!r.optimal()) throw std::logic_error("reserve_margin needs an optimal result");
    double up = 0, dn = 0;
    const auto& R = r.reserves;
    for (const auto* v : {&R.pv_up, &R.dg_up, &R.es_up, &R.load_up})
        for (const auto& d : *v) up += d.at(k);
    for (const auto* v : {&R.pv_dn, &R.dg_dn, &R.es_dn, &R.load_dn})
        for (const auto& d : *v) dn += d.at(k);
    return {up, dn};
}

}  // namespace mgres::robust

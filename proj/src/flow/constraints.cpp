#include "mgres/flow/constraints.hpp"

#include <cmath>
#include <numbers>

namespace mgres::flow {

using lp::Relation;
using lp::Term;

const char* to_string(Tag t) {
    static const char* names[] = {"voltage_drop", "power_balance", "nodal_injection", "voltage_limits",
                                  "line_limits",  "pv_cap",        "dg_cap",          "storage",
                                  "curtailment_bounds", "power_factor", "reserve",     "recourse"};
    const int i = static_cast<int>(t);
    return i >= 0 && i < static_cast<int>(Tag::Count) ? names[i] : "?";
}

const char* to_string(ParamKind k) {
    switch (k) {
        case ParamKind::DgCapacity: return "dg_capacity";
        case ParamKind::LoadDesired: return "load_desired";
        case ParamKind::PvForecast: return "pv_forecast";
    }
    return "?";
}

std::size_t ConstraintBlock::count(Tag t) const {
    std::size_t n = 0;
    for (const auto& r : rows) n += r.tag == t;
    return n;
}

void ConstraintBlock::append(ConstraintBlock&& other) {
    rows.insert(rows.end(), std::make_move_iterator(other.rows.begin()), std::make_move_iterator(other.rows.end()));
}

void ConstraintBlock::add(Tag tag, std::string name, std::vector<Term> terms, Relation rel, double rhs,
                          std::vector<ParamTerm> params) {
    rows.push_back({lp::Row{std::move(name), std::move(terms), rel, rhs}, tag, std::move(params)});
}

double polygon_angle(int k, int sides) { return std::numbers::pi * (2.0 * k + 1.0) / sides; }
double polygon_rhs_factor(int sides) { return std::cos(std::numbers::pi / sides); }

double nominal_param(const grid::NetworkModel& m, ParamId id) {
    const double s = m.base.s_va();
    switch (id.kind) {
        case ParamKind::DgCapacity: return m.dg.at(id.entity).capacity_va / s;
        case ParamKind::LoadDesired: return m.loads.at(id.entity).p_des_w.at(id.step) / s;
        case ParamKind::PvForecast: return m.pv.at(id.entity).forecast_w.at(id.step) / s;
    }
    return 0.0;
}

void lower_into(lp::LinearProgram& lp, const ConstraintBlock& block, const ParamResolver& resolve) {
    for (const auto& fr : block.rows) {
        lp::Row row = fr.row;
        for (const auto& pt : fr.params) {
            const ParamExpr e = resolve(pt.id);
            row.rhs -= pt.coef * e.constant;
            for (const auto& t : e.terms) row.terms.push_back({t.var, pt.coef * t.coef});
        }
        lp.add_row(std::move(row));
    }
}

void lower_nominal(lp::LinearProgram& lp, const ConstraintBlock& block, const grid::NetworkModel& m) {
    lower_into(lp, block, [&](ParamId id) { return ParamExpr{nominal_param(m, id), {}}; });
}

namespace {

std::string rname(const char* what, const std::string& ent, int ph, int k, int extra = -1) {
    std::string s = std::string(what) + "[" + ent;
    if (ph >= 0) s += "." + std::string(1, static_cast<char>('a' + ph));
    s += "," + std::to_string(k);
    if (extra >= 0) s += "," + std::to_string(extra);
    return s + "]";
}

// Polygon rows for one device phase. Normals with a positive P component use
// P + up/n (the device may be pushed up by its reserve), negative ones P - dn/n.
void polygon(ConstraintBlock& b, Tag tag, const std::string& ent, int ph, int k, std::size_t p, std::size_t q,
             int sides, double radius, long up, long dn, double inv_n, const ParamTerm* cap) {
    const double f = polygon_rhs_factor(sides);
    for (int s = 0; s < sides; ++s) {
        const double th = polygon_angle(s, sides);
        const double c = std::cos(th), sn = std::sin(th);
        std::vector<Term> t{{p, c}, {q, sn}};
        if (c > 1e-12 && up >= 0) t.push_back({static_cast<std::size_t>(up), c * inv_n});
        if (c < -1e-12 && dn >= 0) t.push_back({static_cast<std::size_t>(dn), -c * inv_n});
        std::vector<ParamTerm> params;
        double rhs = radius * f;
        if (cap) {
            params.push_back({cap->id, -f * cap->coef});
            rhs = 0.0;
        }
        b.add(tag, rname("poly", ent, ph, k, s), std::move(t), Relation::LessEqual, rhs, std::move(params));
    }
}

long rv(const VariableNamespace& ns, VarKind kind, int d, int k) {
    return ns.reserves() ? static_cast<long>(ns.reserve(kind, d, k)) : -1L;
}

void push_if(std::vector<Term>& t, long var, double coef) {
    if (var >= 0) t.push_back({static_cast<std::size_t>(var), coef});
}

}  // namespace

ConstraintBlock emit_voltage_drop(const grid::NetworkModel& m, const VariableNamespace& ns) {
    ConstraintBlock b;
    const auto& topo = ns.topology();
    for (int l = 0; l < static_cast<int>(m.branches.size()); ++l) {
        const auto& br = m.branches[l];
        const auto z = grid::effective_impedance(br, m.base);
        const int from = topo.branch_from[l], to = topo.branch_to[l];
        for (int ph : br.phases.list())
            for (int k = ns.first_step(); k < ns.end_step(); ++k)
                b.add(Tag::VoltageDrop, rname("vdrop", br.id, ph, k),
                      {{ns.w(to, ph, k), 1.0},
                       {ns.w(from, ph, k), -1.0},
                       {ns.pflow(l, ph, k), 2.0 * z.r[ph]},
                       {ns.qflow(l, ph, k), 2.0 * z.x[ph]}},
                      Relation::Equal, 0.0);
    }
    return b;
}

ConstraintBlock emit_power_balance(const grid::NetworkModel& m, const VariableNamespace& ns) {
    ConstraintBlock b;
    const auto& topo = ns.topology();
    const int nb = static_cast<int>(m.buses.size());
    std::vector<std::vector<int>> pv_at(nb), dg_at(nb), es_at(nb), ld_at(nb);
    for (int d = 0; d < static_cast<int>(m.pv.size()); ++d) pv_at[m.bus_index(m.pv[d].bus)].push_back(d);
    for (int d = 0; d < static_cast<int>(m.dg.size()); ++d) dg_at[m.bus_index(m.dg[d].bus)].push_back(d);
    for (int d = 0; d < static_cast<int>(m.storage.size()); ++d) es_at[m.bus_index(m.storage[d].bus)].push_back(d);
    for (int d = 0; d < static_cast<int>(m.loads.size()); ++d) ld_at[m.bus_index(m.loads[d].bus)].push_back(d);

    for (int bus = 0; bus < nb; ++bus) {
        for (int ph : m.buses[bus].phases.list()) {
            for (int k = ns.first_step(); k < ns.end_step(); ++k) {
                for (int pq = 0; pq < 2; ++pq) {
                    const bool P = pq == 0;
                    std::vector<Term> t;
                    const int par = topo.parent_branch[bus];
                    if (par >= 0) t.push_back({P ? ns.pflow(par, ph, k) : ns.qflow(par, ph, k), 1.0});
                    for (int l : topo.child_branches[bus])
                        if (m.branches[l].phases.has(ph))
                            t.push_back({P ? ns.pflow(l, ph, k) : ns.qflow(l, ph, k), -1.0});
                    for (int d : pv_at[bus])
                        if (m.pv[d].phases.has(ph)) t.push_back({P ? ns.ppv(d, ph, k) : ns.qpv(d, ph, k), 1.0});
                    for (int d : dg_at[bus])
                        if (m.dg[d].phases.has(ph)) t.push_back({P ? ns.pdg(d, ph, k) : ns.qdg(d, ph, k), 1.0});
                    for (int d : es_at[bus])
                        if (m.storage[d].phases.has(ph))
                            t.push_back({P ? ns.pes(d, ph, k) : ns.qes(d, ph, k), 1.0});
                    for (int d : ld_at[bus])
                        if (m.loads[d].phases.has(ph))
                            t.push_back({P ? ns.pload(d, ph, k) : ns.qload(d, ph, k), -1.0});
                    if (bus == topo.root && ns.phase_exchange())
                        t.push_back({P ? ns.xp(ph, k) : ns.xq(ph, k), 1.0});
                    b.add(Tag::PowerBalance, rname(P ? "pbal" : "qbal", m.buses[bus].id, ph, k), std::move(t),
                          Relation::Equal, 0.0);
                }
            }
        }
    }
    if (ns.phase_exchange()) {
        // the reference bus may move power between its phases, never create it
        const auto& root = m.buses[topo.root];
        for (int k = ns.first_step(); k < ns.end_step(); ++k)
            for (int pq = 0; pq < 2; ++pq) {
                std::vector<Term> t;
                for (int ph : root.phases.list()) t.push_back({pq == 0 ? ns.xp(ph, k) : ns.xq(ph, k), 1.0});
                b.add(Tag::PowerBalance, rname(pq == 0 ? "xpsum" : "xqsum", root.id, -1, k), std::move(t),
                      Relation::Equal, 0.0);
            }
    }
    return b;
}

ConstraintBlock emit_nodal_injection(const grid::NetworkModel& m, const VariableNamespace& ns) {
    ConstraintBlock b;
    for (int d = 0; d < static_cast<int>(m.loads.size()); ++d) {
        const auto& ld = m.loads[d];
        const double tq = ld.q_ratio();
        for (int ph : ld.phases.list())
            for (int k = ns.first_step(); k < ns.end_step(); ++k)
                b.add(Tag::NodalInjection, rname("qload", ld.id, ph, k),
                      {{ns.qload(d, ph, k), 1.0}, {ns.pload(d, ph, k), -tq}}, Relation::Equal, 0.0);
    }
    return b;
}

ConstraintBlock emit_voltage_limits(const grid::NetworkModel& m, const VariableNamespace& ns) {
    ConstraintBlock b;
    const int root = ns.topology().root;
    for (int bus = 0; bus < static_cast<int>(m.buses.size()); ++bus) {
        const auto& B = m.buses[bus];
        for (int ph : B.phases.list())
            for (int k = ns.first_step(); k < ns.end_step(); ++k) {
                const auto w = ns.w(bus, ph, k);
                if (bus == root) {
                    b.add(Tag::VoltageLimits, rname("vref", B.id, ph, k), {{w, 1.0}}, Relation::Equal, 1.0);
                    continue;
                }
                b.add(Tag::VoltageLimits, rname("vmin", B.id, ph, k), {{w, 1.0}}, Relation::GreaterEqual,
                      B.v_min * B.v_min);
                b.add(Tag::VoltageLimits, rname("vmax", B.id, ph, k), {{w, 1.0}}, Relation::LessEqual,
                      B.v_max * B.v_max);
            }
    }
    return b;
}

ConstraintBlock emit_line_limits(const grid::NetworkModel& m, const VariableNamespace& ns, const FlowOptions& o) {
    ConstraintBlock b;
    const double s = m.base.s_va();
    for (int l = 0; l < static_cast<int>(m.branches.size()); ++l) {
        const auto& br = m.branches[l];
        for (int ph : br.phases.list())
            for (int k = ns.first_step(); k < ns.end_step(); ++k)
                polygon(b, Tag::LineLimits, br.id, ph, k, ns.pflow(l, ph, k), ns.qflow(l, ph, k), o.poly_sides,
                        br.flow_limit_va / s, -1, -1, 0.0, nullptr);
    }
    return b;
}

ConstraintBlock emit_pv_cap(const grid::NetworkModel& m, const VariableNamespace& ns, const FlowOptions& o) {
    ConstraintBlock b;
    const double s = m.base.s_va();
    for (int d = 0; d < static_cast<int>(m.pv.size()); ++d) {
        const auto& u = m.pv[d];
        const double inv_n = 1.0 / u.phases.count();
        for (int ph : u.phases.list())
            for (int k = ns.first_step(); k < ns.end_step(); ++k)
                polygon(b, Tag::PvCap, u.id, ph, k, ns.ppv(d, ph, k), ns.qpv(d, ph, k), o.poly_sides,
                        u.capacity_va / s * inv_n, rv(ns, VarKind::RpvUp, d, k), rv(ns, VarKind::RpvDn, d, k),
                        inv_n, nullptr);
    }
    return b;
}

ConstraintBlock emit_dg_cap(const grid::NetworkModel& m, const VariableNamespace& ns, const FlowOptions& o) {
    ConstraintBlock b;
    for (int d = 0; d < static_cast<int>(m.dg.size()); ++d) {
        const auto& u = m.dg[d];
        const double inv_n = 1.0 / u.phases.count();
        for (int ph : u.phases.list())
            for (int k = ns.first_step(); k < ns.end_step(); ++k) {
                const ParamTerm cap{{ParamKind::DgCapacity, d, k}, inv_n};
                const long up = rv(ns, VarKind::RdgUp, d, k), dn = rv(ns, VarKind::RdgDn, d, k);
                polygon(b, Tag::DgCap, u.id, ph, k, ns.pdg(d, ph, k), ns.qdg(d, ph, k), o.poly_sides, 0.0, up, dn,
                        inv_n, &cap);
                std::vector<Term> t{{ns.pdg(d, ph, k), 1.0}};
                push_if(t, dn, -inv_n);
                b.add(Tag::DgCap, rname("dgmin", u.id, ph, k), std::move(t), Relation::GreaterEqual, 0.0);
            }
    }
    return b;
}

ConstraintBlock emit_storage(const grid::NetworkModel& m, const VariableNamespace& ns, const FlowOptions& o,
                             const std::vector<double>* initial_wh) {
    ConstraintBlock b;
    const double s = m.base.s_va();
    const double dt = m.dt_hours();
    const int k0 = ns.first_step(), k1 = ns.end_step();
    for (int d = 0; d < static_cast<int>(m.storage.size()); ++d) {
        const auto& u = m.storage[d];
        const double inv_n = 1.0 / u.phases.count();
        const double e0 = (initial_wh ? initial_wh->at(d) : u.initial_wh) / s;
        b.add(Tag::Storage, rname("soc0", u.id, -1, k0), {{ns.soc(d, k0), 1.0}}, Relation::Equal, e0);
        std::vector<Term> cum_up, cum_dn;  // reserves held so far, in energy
        for (int k = k0; k < k1; ++k) {
            std::vector<Term> t{{ns.soc(d, k + 1), 1.0}, {ns.soc(d, k), -1.0}};
            for (int ph : u.phases.list()) t.push_back({ns.pes(d, ph, k), dt});
            b.add(Tag::Storage, rname("soc", u.id, -1, k), std::move(t), Relation::Equal, 0.0);

            if (ns.reserves()) {
                cum_up.push_back({ns.reserve(VarKind::ResUp, d, k), -dt});
                cum_dn.push_back({ns.reserve(VarKind::ResDn, d, k), dt});
            }
            std::vector<Term> lo{{ns.soc(d, k + 1), 1.0}};
            lo.insert(lo.end(), cum_up.begin(), cum_up.end());
            b.add(Tag::Storage, rname("socmin", u.id, -1, k + 1), std::move(lo), Relation::GreaterEqual,
                  u.energy_min_wh / s);
            std::vector<Term> hi{{ns.soc(d, k + 1), 1.0}};
            hi.insert(hi.end(), cum_dn.begin(), cum_dn.end());
            b.add(Tag::Storage, rname("socmax", u.id, -1, k + 1), std::move(hi), Relation::LessEqual,
                  u.energy_max_wh / s);

            const long up = rv(ns, VarKind::ResUp, d, k), dn = rv(ns, VarKind::ResDn, d, k);
            for (int ph : u.phases.list()) {
                std::vector<Term> pu{{ns.pes(d, ph, k), 1.0}};
                push_if(pu, up, inv_n);
                b.add(Tag::Storage, rname("pesmax", u.id, ph, k), std::move(pu), Relation::LessEqual,
                      u.power_w / s * inv_n);
                std::vector<Term> pl{{ns.pes(d, ph, k), 1.0}};
                push_if(pl, dn, -inv_n);
                b.add(Tag::Storage, rname("pesmin", u.id, ph, k), std::move(pl), Relation::GreaterEqual,
                      -u.power_w / s * inv_n);
                polygon(b, Tag::Storage, u.id, ph, k, ns.pes(d, ph, k), ns.qes(d, ph, k), o.poly_sides,
                        u.capacity_va / s * inv_n, up, dn, inv_n, nullptr);
            }
        }
        if (o.terminal_soc)
            b.add(Tag::Storage, rname("socend", u.id, -1, k1), {{ns.soc(d, k1), 1.0}}, Relation::GreaterEqual, e0);
    }
    return b;
}

ConstraintBlock emit_curtailment_bounds(const grid::NetworkModel& m, const VariableNamespace& ns) {
    ConstraintBlock b;
    const double s = m.base.s_va();
    for (int d = 0; d < static_cast<int>(m.pv.size()); ++d) {
        const auto& u = m.pv[d];
        const double inv_n = 1.0 / u.phases.count();
        for (int ph : u.phases.list())
            for (int k = ns.first_step(); k < ns.end_step(); ++k) {
                std::vector<Term> lo{{ns.ppv(d, ph, k), 1.0}};
                push_if(lo, rv(ns, VarKind::RpvDn, d, k), -inv_n);
                b.add(Tag::CurtailmentBounds, rname("pvmin", u.id, ph, k), std::move(lo), Relation::GreaterEqual, 0.0);
                std::vector<Term> hi{{ns.ppv(d, ph, k), 1.0}};
                push_if(hi, rv(ns, VarKind::RpvUp, d, k), inv_n);
                b.add(Tag::CurtailmentBounds, rname("pvmax", u.id, ph, k), std::move(hi), Relation::LessEqual, 0.0,
                      {{{ParamKind::PvForecast, d, k}, -inv_n}});
            }
    }
    for (int d = 0; d < static_cast<int>(m.loads.size()); ++d) {
        const auto& u = m.loads[d];
        const double inv_n = 1.0 / u.phases.count();
        for (int ph : u.phases.list())
            for (int k = ns.first_step(); k < ns.end_step(); ++k) {
                // load up-reserve sheds demand, so it must fit above the critical minimum
                std::vector<Term> lo{{ns.pload(d, ph, k), 1.0}};
                push_if(lo, rv(ns, VarKind::RloadUp, d, k), -inv_n);
                b.add(Tag::CurtailmentBounds, rname("ldmin", u.id, ph, k), std::move(lo), Relation::GreaterEqual,
                      u.p_min_w.at(k) / s * inv_n);
                std::vector<Term> hi{{ns.pload(d, ph, k), 1.0}};
                push_if(hi, rv(ns, VarKind::RloadDn, d, k), inv_n);
                b.add(Tag::CurtailmentBounds, rname("ldmax", u.id, ph, k), std::move(hi), Relation::LessEqual, 0.0,
                      {{{ParamKind::LoadDesired, d, k}, -inv_n}});
            }
    }
    return b;
}

ConstraintBlock emit_power_factor(const grid::NetworkModel& m, const VariableNamespace& ns, const FlowOptions& o) {
    ConstraintBlock b;
    if (!o.power_factor) return b;
    const double g = std::tan(std::acos(o.pv_min_pf));
    for (int d = 0; d < static_cast<int>(m.pv.size()); ++d) {
        const auto& u = m.pv[d];
        for (int ph : u.phases.list())
            for (int k = ns.first_step(); k < ns.end_step(); ++k) {
                b.add(Tag::PowerFactor, rname("pfhi", u.id, ph, k), {{ns.qpv(d, ph, k), 1.0}, {ns.ppv(d, ph, k), -g}},
                      Relation::LessEqual, 0.0);
                b.add(Tag::PowerFactor, rname("pflo", u.id, ph, k), {{ns.qpv(d, ph, k), 1.0}, {ns.ppv(d, ph, k), g}},
                      Relation::GreaterEqual, 0.0);
            }
    }
    return b;
}

ConstraintBlock emit_limits(const grid::NetworkModel& m, const VariableNamespace& ns, const FlowOptions& o) {
    ConstraintBlock b = emit_voltage_limits(m, ns);
    b.append(emit_line_limits(m, ns, o));
    b.append(emit_pv_cap(m, ns, o));
    b.append(emit_dg_cap(m, ns, o));
    b.append(emit_storage(m, ns, o));
    b.append(emit_curtailment_bounds(m, ns));
    b.append(emit_power_factor(m, ns, o));
    return b;
}

ConstraintBlock emit_all(const grid::NetworkModel& m, const VariableNamespace& ns, const FlowOptions& o) {
    ConstraintBlock b = emit_voltage_drop(m, ns);
    b.append(emit_power_balance(m, ns));
    b.append(emit_nodal_injection(m, ns));
    b.append(emit_limits(m, ns, o));
    return b;
}

std::map<Tag, std::size_t> expected_row_counts(const grid::NetworkModel& m, const VariableNamespace& ns,
                                               const FlowOptions& o) {
    const std::size_t K = ns.num_steps();
    const std::size_t poly = o.poly_sides;
    std::size_t branch_ph = 0, bus_ph = 0, root_ph = 0, load_ph = 0, pv_ph = 0, dg_ph = 0, es_ph = 0;
    for (const auto& b : m.branches) branch_ph += b.phases.count();
    for (const auto& b : m.buses) bus_ph += b.phases.count();
    root_ph = m.buses[ns.topology().root].phases.count();
    for (const auto& d : m.loads) load_ph += d.phases.count();
    for (const auto& d : m.pv) pv_ph += d.phases.count();
    for (const auto& d : m.dg) dg_ph += d.phases.count();
    for (const auto& d : m.storage) es_ph += d.phases.count();
    const std::size_t units = m.storage.size();
    std::map<Tag, std::size_t> c;
    c[Tag::VoltageDrop] = branch_ph * K;
    c[Tag::PowerBalance] = 2 * bus_ph * K + (ns.phase_exchange() ? 2 * K : 0);
    c[Tag::NodalInjection] = load_ph * K;
    c[Tag::VoltageLimits] = (2 * (bus_ph - root_ph) + root_ph) * K;
    c[Tag::LineLimits] = poly * branch_ph * K;
    c[Tag::PvCap] = poly * pv_ph * K;
    c[Tag::DgCap] = (poly + 1) * dg_ph * K;
    c[Tag::Storage] = units * (1 + 3 * K + (o.terminal_soc ? 1 : 0)) + (2 + poly) * es_ph * K;
    c[Tag::CurtailmentBounds] = 2 * (pv_ph + load_ph) * K;
    c[Tag::PowerFactor] = o.power_factor ? 2 * pv_ph * K : 0;
    return c;
}

}  // namespace mgres::flow

#include "mgres/advset/advset.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>

#include "mgres/flow/constraints.hpp"
#include "mgres/flow/sweep.hpp"
#include "mgres/grid/validate.hpp"
#include "mgres/util/errors.hpp"
#include "mgres/util/rng.hpp"

namespace mgres::advset {

using flow::ParamKind;
using lp::Relation;
using lp::Term;

namespace {
const char* kAxisNames[] = {"dg_capacity_loss", "load_increase", "pv_forecast_error"};
}

const char* to_string(AxisKind k) { return kAxisNames[static_cast<int>(k)]; }

AxisKind axis_kind_from(const std::string& s) {
    for (int i = 0; i < 3; ++i)
        if (s == kAxisNames[i]) return static_cast<AxisKind>(i);
    throw InputError("axis.kind", "unknown axis kind '" + s + "'");
}

std::string AdversarialAxis::label() const {
    std::string s = std::string(to_string(kind)) + ":" + target + "@" + std::to_string(first_step);
    if (last_step != first_step + 1) s += "-" + std::to_string(last_step - 1);
    if (sign < 0) s += "(-)";
    return s;
}

namespace {

int axis_entity(const grid::NetworkModel& m, const AdversarialAxis& a) {
    switch (a.kind) {
        case AxisKind::DgCapacityLoss: return m.dg_index(a.target);
        case AxisKind::LoadIncrease: return m.load_index(a.target);
        case AxisKind::PvForecastError: return m.pv_index(a.target);
    }
    return -1;
}

bool active(const AdversarialAxis& a, int k) { return a.first_step <= k && k < a.last_step; }

}  // namespace

RecourseModel::RecourseModel(const grid::NetworkModel& m, const robust::RobustResult& plan,
                             std::vector<AdversarialAxis> axes, std::vector<double> cap_w, const AdvOptions& opt)
    : m_(m), plan_(plan), axes_(std::move(axes)), cap_(std::move(cap_w)), ns_(m), scale_(m.base.s_va()) {
    grid::require_valid(m);
    if (!plan.optimal()) throw std::logic_error("recourse model needs an optimal plan");
    const auto& sched = plan.dispatch;
    if (axes_.empty()) throw InputError("axes", "at least one axis is required");
    if (cap_.size() != axes_.size()) throw InputError("outer_box", "one extent per axis is required");

    int k0 = axes_[0].first_step, k1 = axes_[0].last_step;
    int dir = 0;
    for (std::size_t i = 0; i < axes_.size(); ++i) {
        const auto& a = axes_[i];
        const std::string where = "axes[" + std::to_string(i) + "]";
        const int e = axis_entity(m, a);
        if (e < 0) throw InputError(where, "unknown target '" + a.target + "' for " + to_string(a.kind));
        if (a.first_step < sched.first_step || a.last_step > sched.first_step + sched.steps ||
            a.first_step >= a.last_step)
            throw InputError(where, "step span outside the schedule");
        if (a.sign != 1 && a.sign != -1) throw InputError(where, "sign must be +1 or -1");
        if (a.sign < 0 && a.kind != AxisKind::LoadIncrease)
            throw InputError(where, "only load axes may point in the negative direction");
        if (!(cap_[i] >= 0)) throw InputError(where, "outer box extent must be >= 0");
        for (std::size_t j = 0; j < i; ++j)
            if (axes_[j].kind == a.kind && entity_[j] == e && axes_[j].first_step < a.last_step &&
                a.first_step < axes_[j].last_step)
                throw InputError(where, "overlaps another axis on the same target");
        entity_.push_back(e);
        if (dir != 0 && dir != a.sign)
            throw MixedDirectionAxes("axes mix imbalance directions; the proportional rule is not linear across them");
        dir = a.sign;
        k0 = std::min(k0, a.first_step);
        k1 = std::max(k1, a.last_step);
    }
    up_ = dir > 0;

    flow::NamespaceOptions nso;
    nso.first_step = k0;
    nso.num_steps = k1 - k0;
    nso.phase_exchange = true;
    ns_ = flow::VariableNamespace(m, nso);
    ns_.declare(lp_);
    z0_ = lp_.num_variables();
    for (std::size_t i = 0; i < axes_.size(); ++i) {
        lp_.add_variable("z[" + axes_[i].label() + "]", 0.0, lp::kInf);
        if (std::isfinite(cap_[i]))
            lp_.add_row("zcap[" + std::to_string(i) + "]", {{z(i), 1.0}}, Relation::LessEqual, cap_[i] / scale_);
    }

    const double S = scale_;
    const int tbase = sched.first_step;
    auto fo = opt.base.flow;
    fo.terminal_soc = false;

    std::vector<double> e_start;
    for (const auto& e : sched.soc_wh) e_start.push_back(e.at(k0 - tbase));

    flow::ConstraintBlock rows = flow::emit_voltage_drop(m, ns_);
    rows.append(flow::emit_power_balance(m, ns_));
    rows.append(flow::emit_voltage_limits(m, ns_));
    rows.append(flow::emit_line_limits(m, ns_, fo));
    rows.append(flow::emit_pv_cap(m, ns_, fo));
    rows.append(flow::emit_dg_cap(m, ns_, fo));
    rows.append(flow::emit_storage(m, ns_, fo, &e_start));
    rows.append(flow::emit_curtailment_bounds(m, ns_));
    rows.append(flow::emit_power_factor(m, ns_, fo));

    flow::lower_into(lp_, rows, [&](flow::ParamId id) {
        flow::ParamExpr e{flow::nominal_param(m, id), {}};
        for (std::size_t i = 0; i < axes_.size(); ++i) {
            const auto& a = axes_[i];
            if (!active(a, id.step) || entity_[i] != id.entity) continue;
            if (a.kind == AxisKind::DgCapacityLoss && id.kind == ParamKind::DgCapacity) e.terms.push_back({z(i), -1.0});
            if (a.kind == AxisKind::PvForecastError && id.kind == ParamKind::PvForecast) e.terms.push_back({z(i), -1.0});
            if (a.kind == AxisKind::LoadIncrease && id.kind == ParamKind::LoadDesired)
                e.terms.push_back({z(i), static_cast<double>(a.sign)});
        }
        return e;
    });

    // Recourse: realized = schedule + own event + proportional share of the imbalance.
    const auto order = sim::pool_order(m);
    for (int k = k0; k < k1; ++k) {
        const int t = k - tbase;
        const std::string ks = std::to_string(k);
        std::vector<Term> delta;  // imbalance as a function of z, pu
        std::vector<char> pv_bad(m.pv.size()), dg_bad(m.dg.size()), ld_bad(m.loads.size());
        for (std::size_t i = 0; i < axes_.size(); ++i) {
            if (!active(axes_[i], k)) continue;
            delta.push_back({z(i), static_cast<double>(axes_[i].sign)});
            switch (axes_[i].kind) {
                case AxisKind::DgCapacityLoss: dg_bad[entity_[i]] = 1; break;
                case AxisKind::PvForecastError: pv_bad[entity_[i]] = 1; break;
                case AxisKind::LoadIncrease: ld_bad[entity_[i]] = 1; break;
            }
        }
        std::vector<double> share(order.size(), 0.0);
        double pool = 0.0;
        for (std::size_t j = 0; j < order.size(); ++j) {
            const auto& d = order[j];
            const bool bad = (d.cls == sim::DeviceClass::Pv && pv_bad[d.index]) ||
                             (d.cls == sim::DeviceClass::Dg && dg_bad[d.index]) ||
                             (d.cls == sim::DeviceClass::Load && ld_bad[d.index]);
            if (!bad) share[j] = sim::reserve_of(plan.reserves, d, t, up_);
            pool += share[j];
        }
        if (!delta.empty()) {
            std::vector<Term> r;
            for (auto tm : delta) r.push_back({tm.var, up_ ? tm.coef : -tm.coef});
            lp_.add_row("pool[" + ks + "]", std::move(r), Relation::LessEqual, pool / S);
        }
        for (auto& s : share) s = pool > 0 ? s / pool : 0.0;

        // own[i] = (event coefficient on the device's total output) for axes hitting it
        auto pin_p = [&](std::size_t col, double target, int n, std::vector<Term> own, double dep_share, double dsign,
                         const std::string& name) {
            std::vector<Term> row{{col, 1.0}};
            for (auto& o : own) row.push_back({o.var, -o.coef / n});
            if (dep_share > 0)
                for (auto& d : delta) row.push_back({d.var, -dsign * dep_share * d.coef / n});
            lp_.add_row(name, std::move(row), Relation::Equal, target / S);
        };
        auto own_terms = [&](AxisKind kind, int ent, double coef) {
            std::vector<Term> v;
            for (std::size_t i = 0; i < axes_.size(); ++i)
                if (axes_[i].kind == kind && entity_[i] == ent && active(axes_[i], k))
                    v.push_back({z(i), coef * axes_[i].sign});
            return v;
        };
        for (std::size_t j = 0; j < order.size(); ++j) {
            const auto& d = order[j];
            const double sh = share[j];
            switch (d.cls) {
                case sim::DeviceClass::Pv: {
                    const auto& u = m.pv[d.index];
                    for (int ph : u.phases.list()) {
                        pin_p(ns_.ppv(d.index, ph, k), sched.pv[d.index].p[t][ph], u.phases.count(),
                              own_terms(AxisKind::PvForecastError, d.index, -1.0), sh, 1.0,
                              "rcp[" + u.id + "." + char('a' + ph) + "," + ks + "]");
                        lp_.add_row("rcq[" + u.id + "." + char('a' + ph) + "," + ks + "]",
                                    {{ns_.qpv(d.index, ph, k), 1.0}}, Relation::Equal, sched.pv[d.index].q[t][ph] / S);
                    }
                    break;
                }
                case sim::DeviceClass::Dg: {
                    const auto& u = m.dg[d.index];
                    for (int ph : u.phases.list()) {
                        pin_p(ns_.pdg(d.index, ph, k), sched.dg[d.index].p[t][ph], u.phases.count(),
                              own_terms(AxisKind::DgCapacityLoss, d.index, -1.0), sh, 1.0,
                              "rcp[" + u.id + "." + char('a' + ph) + "," + ks + "]");
                        lp_.add_row("rcq[" + u.id + "." + char('a' + ph) + "," + ks + "]",
                                    {{ns_.qdg(d.index, ph, k), 1.0}}, Relation::Equal, sched.dg[d.index].q[t][ph] / S);
                    }
                    break;
                }
                case sim::DeviceClass::Es: {
                    const auto& u = m.storage[d.index];
                    for (int ph : u.phases.list()) {
                        pin_p(ns_.pes(d.index, ph, k), sched.es[d.index].p[t][ph], u.phases.count(), {}, sh, 1.0,
                              "rcp[" + u.id + "." + char('a' + ph) + "," + ks + "]");
                        lp_.add_row("rcq[" + u.id + "." + char('a' + ph) + "," + ks + "]",
                                    {{ns_.qes(d.index, ph, k), 1.0}}, Relation::Equal, sched.es[d.index].q[t][ph] / S);
                    }
                    break;
                }
                case sim::DeviceClass::Load: {
                    const auto& u = m.loads[d.index];
                    for (int ph : u.phases.list()) {
                        pin_p(ns_.pload(d.index, ph, k), sched.load[d.index].p[t][ph], u.phases.count(),
                              own_terms(AxisKind::LoadIncrease, d.index, 1.0), sh, -1.0,
                              "rcp[" + u.id + "." + char('a' + ph) + "," + ks + "]");
                        lp_.add_row("rcq[" + u.id + "." + char('a' + ph) + "," + ks + "]",
                                    {{ns_.qload(d.index, ph, k), 1.0}}, Relation::Equal,
                                    sched.load[d.index].q[t][ph] / S);
                    }
                    break;
                }
            }
        }
    }

    // SoC after the window: the schedule continues, shifted by whatever the window drained.
    const int t1 = k1 - tbase;
    for (std::size_t d = 0; d < m.storage.size(); ++d) {
        const auto& e = sched.soc_wh[d];
        if (t1 + 1 >= static_cast<int>(e.size())) continue;
        double lo = 1e300, hi = -1e300;
        for (std::size_t j = t1 + 1; j < e.size(); ++j) {
            lo = std::min(lo, e[j] - e[t1]);
            hi = std::max(hi, e[j] - e[t1]);
        }
        const auto& u = m.storage[d];
        lp_.add_row("soctail_min[" + u.id + "]", {{ns_.soc(d, k1), 1.0}}, Relation::GreaterEqual,
                    (u.energy_min_wh - lo) / S);
        lp_.add_row("soctail_max[" + u.id + "]", {{ns_.soc(d, k1), 1.0}}, Relation::LessEqual,
                    (u.energy_max_wh - hi) / S);
    }
}

lp::LinearProgram RecourseModel::axis_problem(std::size_t i) const {
    lp::LinearProgram p = lp_;
    for (std::size_t j = 0; j < dim(); ++j)
        if (j != i) p.set_bounds(z(j), 0.0, 0.0);
    p.set_objective(z(i), -1.0);
    return p;
}

lp::LinearProgram RecourseModel::fixed_problem(const Point& z_w) const {
    lp::LinearProgram p = lp_;
    for (std::size_t j = 0; j < dim(); ++j) p.set_bounds(z(j), z_w.at(j) / scale_, z_w.at(j) / scale_);
    return p;
}

sim::StepDisturbance RecourseModel::disturbance(const Point& z_w, int k) const {
    auto d = sim::StepDisturbance::none(m_);
    for (std::size_t i = 0; i < dim(); ++i) {
        const auto& a = axes_[i];
        if (!active(a, k)) continue;
        const int e = entity_[i];
        switch (a.kind) {
            case AxisKind::DgCapacityLoss:
                d.dg_loss[e] += z_w[i];
                d.dg_cap_loss[e] += z_w[i];
                d.dg_impaired[e] = 1;
                break;
            case AxisKind::PvForecastError:
                d.pv_loss[e] += z_w[i];
                d.pv_impaired[e] = 1;
                break;
            case AxisKind::LoadIncrease:
                d.load_delta[e] += a.sign * z_w[i];
                d.load_impaired[e] = 1;
                break;
        }
    }
    return d;
}

std::vector<double> realize_point(const grid::NetworkModel& m, const robust::RobustResult& plan,
                                  const flow::VariableNamespace& ns, std::size_t ncols,
                                  const std::function<sim::StepDisturbance(int)>& dist) {
    const auto& sched = plan.dispatch;
    const double S = m.base.s_va();
    const auto topo = grid::build_topology(m);
    std::vector<double> x(ncols, 0.0);
    std::vector<double> soc;
    for (const auto& e : sched.soc_wh) soc.push_back(e.at(ns.first_step() - sched.first_step) / S);
    for (std::size_t d = 0; d < m.storage.size(); ++d) x[ns.soc(d, ns.first_step())] = soc[d];

    for (int k = ns.first_step(); k < ns.end_step(); ++k) {
        const int t = k - sched.first_step;
        const auto real = sim::realize_step(m, sched, plan.reserves, t, dist(k));
        std::vector<flow::PhaseVec> pin(m.buses.size(), flow::PhaseVec{}), qin(m.buses.size(), flow::PhaseVec{});
        auto put = [&](auto pcol, auto qcol, const std::string& bus, grid::PhaseSet phs, const sim::PhaseVec& p,
                       const sim::PhaseVec& q, double sgn) {
            const int b = m.bus_index(bus);
            for (int ph : phs.list()) {
                x[pcol(ph)] = p[ph] / S;
                x[qcol(ph)] = q[ph] / S;
                pin[b][ph] += sgn * p[ph] / S;
                qin[b][ph] += sgn * q[ph] / S;
            }
        };
        for (int d = 0; d < static_cast<int>(m.pv.size()); ++d)
            put([&](int ph) { return ns.ppv(d, ph, k); }, [&](int ph) { return ns.qpv(d, ph, k); }, m.pv[d].bus,
                m.pv[d].phases, real.pv_p[d], real.pv_q[d], 1.0);
        for (int d = 0; d < static_cast<int>(m.dg.size()); ++d)
            put([&](int ph) { return ns.pdg(d, ph, k); }, [&](int ph) { return ns.qdg(d, ph, k); }, m.dg[d].bus,
                m.dg[d].phases, real.dg_p[d], real.dg_q[d], 1.0);
        for (int d = 0; d < static_cast<int>(m.storage.size()); ++d)
            put([&](int ph) { return ns.pes(d, ph, k); }, [&](int ph) { return ns.qes(d, ph, k); }, m.storage[d].bus,
                m.storage[d].phases, real.es_p[d], real.es_q[d], 1.0);
        for (int d = 0; d < static_cast<int>(m.loads.size()); ++d)
            put([&](int ph) { return ns.pload(d, ph, k); }, [&](int ph) { return ns.qload(d, ph, k); },
                m.loads[d].bus, m.loads[d].phases, real.load_p[d], real.load_q[d], -1.0);

        const auto fs = flow::linear_flow(m, topo, pin, qin);
        for (std::size_t b = 0; b < m.buses.size(); ++b)
            for (int ph : m.buses[b].phases.list()) x[ns.w(b, ph, k)] = fs.w[b][ph];
        for (std::size_t l = 0; l < m.branches.size(); ++l)
            for (int ph : m.branches[l].phases.list()) {
                x[ns.pflow(l, ph, k)] = fs.pflow[l][ph];
                x[ns.qflow(l, ph, k)] = fs.qflow[l][ph];
            }
        if (ns.phase_exchange())
            for (int ph : m.buses[topo.root].phases.list()) {
                x[ns.xp(ph, k)] = fs.xp[ph];
                x[ns.xq(ph, k)] = fs.xq[ph];
            }
        for (std::size_t d = 0; d < m.storage.size(); ++d) {
            double p = 0;
            for (int ph : m.storage[d].phases.list()) p += real.es_p[d][ph] / S;
            soc[d] -= m.dt_hours() * p;
            x[ns.soc(d, k + 1)] = soc[d];
        }
    }
    return x;
}

std::vector<double> RecourseModel::forward(const Point& z_w) const {
    if (z_w.size() != dim()) throw std::invalid_argument("point dimension mismatch");
    auto x = realize_point(m_, plan_, ns_, lp_.num_variables(), [&](int k) { return disturbance(z_w, k); });
    for (std::size_t i = 0; i < dim(); ++i) x[z(i)] = z_w[i] / scale_;
    return x;
}

lp::FeasibilityReport RecourseModel::check(const Point& z_w, double tol) const {
    const auto x = forward(z_w);
    return lp::check_feasibility(lp_, x, tol);
}

std::vector<double> caps_from_box(const grid::NetworkModel& m, const std::vector<AdversarialAxis>& axes,
                                  const robust::UncertaintyBox& box) {
    std::vector<double> caps;
    const double S = m.base.s_va();
    for (const auto& a : axes) {
        const int e = axis_entity(m, a);
        if (e < 0) throw InputError("axes", "unknown target '" + a.target + "'");
        double c = lp::kInf;
        for (int k = a.first_step; k < a.last_step; ++k) {
            robust::Interval iv;
            switch (a.kind) {
                case AxisKind::DgCapacityLoss: iv = box.at({ParamKind::DgCapacity, e, k}); c = std::min(c, iv.nom - iv.lo); break;
                case AxisKind::PvForecastError: iv = box.at({ParamKind::PvForecast, e, k}); c = std::min(c, iv.nom - iv.lo); break;
                case AxisKind::LoadIncrease:
                    iv = box.at({ParamKind::LoadDesired, e, k});
                    c = std::min(c, a.sign > 0 ? iv.hi - iv.nom : iv.nom - iv.lo);
                    break;
            }
        }
        caps.push_back(c * S);
    }
    return caps;
}

InnerPolytope characterize(const grid::NetworkModel& m, const robust::RobustResult& plan,
                           const std::vector<AdversarialAxis>& axes, const std::vector<double>& cap_w,
                           const AdvOptions& opt) {
    RecourseModel rm(m, plan, axes, cap_w, opt);
    const double S = m.base.s_va();
    const std::size_t n = axes.size();

    // nominal event must be recoverable, otherwise the plan itself is broken
    {
        const auto sol = lp::solve(rm.fixed_problem(Point(n, 0.0)), opt.base.solver);
        if (!sol.optimal()) {
            std::string rows;
            for (std::size_t i = 0; i < std::min<std::size_t>(sol.certificate_rows.size(), 5); ++i)
                rows += (i ? ", " : "") + rm.lp().row(sol.certificate_rows[i]).name;
            throw AxisInfeasible("the schedule violates its own constraints at the nominal event (rows: " + rows + ")");
        }
    }

    struct AxisOut {
        double alpha = 0;
        bool certified = false;
    };
    auto run = [&](std::size_t i) {
        AxisOut o;
        const auto sol = lp::solve(rm.axis_problem(i), opt.base.solver);
        if (sol.status == lp::SolveStatus::Infeasible)
            throw AxisInfeasible("axis " + axes[i].label() + " is infeasible even at zero magnitude");
        if (sol.status == lp::SolveStatus::Unbounded)
            throw std::runtime_error("axis " + axes[i].label() + " is unbounded; give it an outer box extent");
        o.alpha = std::max(0.0, sol.values[rm.z(i)] * S);
        Point probe(n, 0.0);
        probe[i] = o.alpha + opt.certify_eps_w;
        o.certified = !lp::solve(rm.fixed_problem(probe), opt.base.solver).optimal();
        return o;
    };

    std::vector<AxisOut> out(n);
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned threads = opt.threads > 0 ? static_cast<unsigned>(opt.threads) : hw;
    if (threads <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = run(i);
    } else {
        for (std::size_t b = 0; b < n; b += threads) {
            std::vector<std::future<AxisOut>> fut;
            for (std::size_t i = b; i < std::min(n, b + threads); ++i) fut.push_back(std::async(std::launch::async, run, i));
            for (std::size_t i = b; i < std::min(n, b + threads); ++i) out[i] = fut[i - b].get();
        }
    }

    InnerPolytope p;
    p.axes = axes;
    p.cap_w = cap_w;
    p.first_step = rm.first_step();
    p.end_step = rm.end_step();
    p.vertices.push_back(Point(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        p.alpha_w.push_back(out[i].alpha);
        p.certified.push_back(out[i].certified);
        Point v(n, 0.0);
        v[i] = out[i].alpha;
        p.vertices.push_back(v);
    }
    return p;
}

bool contains(const InnerPolytope& poly, const Point& w) {
    const std::size_t n = poly.dim();
    if (w.size() != n) throw std::invalid_argument("point dimension mismatch");
    // convex weights over the vertices, rows in MW
    lp::LinearProgram p;
    for (std::size_t j = 0; j < poly.vertices.size(); ++j) p.add_variable("l" + std::to_string(j), 0.0, lp::kInf);
    std::vector<Term> one;
    for (std::size_t j = 0; j < poly.vertices.size(); ++j) one.push_back({j, 1.0});
    p.add_row("sum", one, Relation::Equal, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<Term> t;
        for (std::size_t j = 0; j < poly.vertices.size(); ++j)
            if (poly.vertices[j][i] != 0.0) t.push_back({j, poly.vertices[j][i] * 1e-6});
        p.add_row("w" + std::to_string(i), t, Relation::Equal, w[i] * 1e-6);
    }
    return lp::solve(p).optimal();
}

std::vector<Point> sample(const InnerPolytope& poly, std::uint64_t seed, int count) {
    if (count < 1) throw InputError("sample", "count must be >= 1");
    RngStream rng(seed, "sample");
    std::vector<Point> out;
    const std::size_t nv = poly.vertices.size();
    for (int s = 0; s < count; ++s) {
        std::vector<double> lam(nv);
        double tot = 0;
        for (auto& l : lam) tot += (l = rng.exponential());
        Point x(poly.dim(), 0.0);
        for (std::size_t j = 0; j < nv; ++j)
            for (std::size_t i = 0; i < poly.dim(); ++i) x[i] += lam[j] / tot * poly.vertices[j][i];
        // the only nonzero vertex entry on axis i is alpha_i; keep rounding inside it
        for (std::size_t i = 0; i < poly.dim(); ++i) x[i] = std::min(x[i], poly.alpha_w[i]);
        out.push_back(std::move(x));
    }
    return out;
}

double Polygon2d::area() const {
    double a = 0;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        const auto& p = vertices[i];
        const auto& q = vertices[(i + 1) % vertices.size()];
        a += p.first * q.second - q.first * p.second;
    }
    return 0.5 * std::abs(a);
}

Polygon2d project_2d(const InnerPolytope& poly, std::size_t i, std::size_t j) {
    if (i == j) throw InputError("project", "axes must differ");
    if (i >= poly.dim() || j >= poly.dim()) throw InputError("project", "axis index out of range");
    using P = std::pair<double, double>;
    std::vector<P> pts;
    for (const auto& v : poly.vertices) pts.push_back({v[i], v[j]});
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    auto cross = [](const P& o, const P& a, const P& b) {
        return (a.first - o.first) * (b.second - o.second) - (a.second - o.second) * (b.first - o.first);
    };
    Polygon2d out;
    if (pts.size() < 3) {
        out.vertices = pts;
        out.degenerate = true;
        return out;
    }
    // monotone chain
    std::vector<P> h(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0) --k;
        h[k++] = p;
    }
    for (std::size_t a = pts.size() - 1, t = k + 1; a-- > 0;) {
        while (k >= t && cross(h[k - 2], h[k - 1], pts[a]) <= 0) --k;
        h[k++] = pts[a];
    }
    h.resize(k - 1);
    if (h.size() < 3) {
        out.vertices = {pts.front(), pts.back()};
        out.degenerate = true;
        return out;
    }
    out.vertices = std::move(h);
    return out;
}

bool point_in_polygon(const Polygon2d& poly, double x, double y, double tol) {
    const auto& v = poly.vertices;
    if (poly.degenerate) {
        if (v.size() == 1) return std::abs(x - v[0].first) <= tol && std::abs(y - v[0].second) <= tol;
        const double dx = v[1].first - v[0].first, dy = v[1].second - v[0].second;
        const double len2 = dx * dx + dy * dy;
        const double t = std::clamp(((x - v[0].first) * dx + (y - v[0].second) * dy) / len2, 0.0, 1.0);
        return std::hypot(x - v[0].first - t * dx, y - v[0].second - t * dy) <= tol;
    }
    // counter-clockwise: inside when left of (or on) every edge
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto& a = v[i];
        const auto& b = v[(i + 1) % v.size()];
        const double len = std::hypot(b.first - a.first, b.second - a.second);
        const double c = (b.first - a.first) * (y - a.second) - (b.second - a.second) * (x - a.first);
        if (c < -tol * len) return false;
    }
    return true;
}

sim::EventTimeline timeline_for(const grid::NetworkModel& m, const InnerPolytope& poly, const Point& point) {
    if (point.size() != poly.dim()) throw std::invalid_argument("point dimension mismatch");
    struct Tmp {
        double minute;
        int order;  // ends before starts at the same minute
        sim::Event e;
    };
    std::vector<Tmp> tmp;
    for (std::size_t i = 0; i < poly.dim(); ++i) {
        const auto& a = poly.axes[i];
        const double t0 = m.step_minute(a.first_step), t1 = m.step_minute(a.last_step);
        sim::EventKind s, e;
        double mag = point[i];
        switch (a.kind) {
            case AxisKind::DgCapacityLoss: s = sim::EventKind::DgTrip, e = sim::EventKind::DgRestore; break;
            case AxisKind::PvForecastError: s = sim::EventKind::PvLoss, e = sim::EventKind::PvRestore; break;
            default: s = sim::EventKind::LoadMaskStart, e = sim::EventKind::LoadMaskEnd, mag *= a.sign; break;
        }
        tmp.push_back({t0, 1, {t0, s, a.target, mag}});
        tmp.push_back({t1, 0, {t1, e, a.target, std::nullopt}});
    }
    std::stable_sort(tmp.begin(), tmp.end(),
                     [](const Tmp& a, const Tmp& b) { return a.minute != b.minute ? a.minute < b.minute : a.order < b.order; });
    sim::EventTimeline tl;
    for (auto& t : tmp) tl.events.push_back(t.e);
    return tl;
}

}  // namespace mgres::advset

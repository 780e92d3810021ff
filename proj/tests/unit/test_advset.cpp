#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "mgres/advset/advset.hpp"
#include "mgres/sim/simulate.hpp"
#include "mgres/util/errors.hpp"

using namespace mgres;
using namespace mgres::advset;
using robust::ParamKind;

namespace {

const double kInf = lp::kInf;

// DG 2.5 MW feeding a fixed 2 MW load, planned against a 0.5 MW load swing.
robust::RobustResult toy_plan(const grid::NetworkModel& m) {
    robust::UncertaintyBox box(m);
    box.set_si({ParamKind::LoadDesired, 0, 0}, 2e6, 2.5e6);
    dispatch::CostConfig c;
    auto r = robust::solve_robust(m, c, robust::ReserveCosts::scaled(c), box);
    REQUIRE(r.optimal());
    return r;
}

struct SixBus {
    grid::NetworkModel m = fixtures::six_bus();
    robust::RobustResult plan;
    SixBus() {
        robust::UncertaintyBox box(m);
        for (int k = 0; k < m.steps; ++k) {
            const auto& ld = m.loads[0];
            box.set_si({ParamKind::LoadDesired, 0, k}, ld.p_des_w[k], 1.2 * ld.p_des_w[k]);
        }
        dispatch::CostConfig c;
        plan = robust::solve_robust(m, c, robust::ReserveCosts::scaled(c), box);
        REQUIRE(plan.optimal());
    }
    // dg1 holds all the up reserve here (storage is discharging flat out), so it is left untouched
    std::vector<AdversarialAxis> axes(int k0, int k1) const {
        return {{AxisKind::LoadIncrease, "ld3", k0, k1, 1},
                {AxisKind::PvForecastError, "pv1", k0, k1, 1},
                {AxisKind::LoadIncrease, "ld4", k0, k1, 1}};
    }
};

}  // namespace

TEST_CASE("toy load axis is limited by the DG reserve") {
    auto m = fixtures::single_bus(2.5e6, 2e6, 2e6);
    auto plan = toy_plan(m);
    CHECK(plan.dispatch.dg[0].total_p(0) == doctest::Approx(2e6));
    CHECK(plan.reserves.dg_up[0][0] == doctest::Approx(0.5e6));
    std::vector<AdversarialAxis> ax{{AxisKind::LoadIncrease, "load", 0, 1, 1}};
    auto poly = characterize(m, plan, ax, {kInf});
    REQUIRE(poly.alpha_w.size() == 1);
    CHECK(poly.alpha_w[0] == doctest::Approx(0.5e6).epsilon(1e-9));
    CHECK(poly.certified[0]);

    // outer box clamps the axis
    auto clamped = characterize(m, plan, ax, {0.3e6});
    CHECK(clamped.alpha_w[0] == doctest::Approx(0.3e6).epsilon(1e-9));
    CHECK(clamped.certified[0]);
}

TEST_CASE("no reserves means no tolerable load increase") {
    auto m = fixtures::single_bus(2.5e6, 2e6, 2e6);
    auto base = dispatch::solve_baseline(m, {});
    REQUIRE(base.optimal());
    auto plan = robust::without_reserves(base);
    auto poly = characterize(m, plan, {{AxisKind::LoadIncrease, "load", 0, 1, 1}}, {kInf});
    CHECK(poly.alpha_w[0] == doctest::Approx(0).epsilon(1e-9));
}

TEST_CASE("axis validation") {
    auto m = fixtures::single_bus(2.5e6, 2e6, 2e6);
    auto plan = toy_plan(m);
    CHECK_THROWS_AS(characterize(m, plan, {{AxisKind::LoadIncrease, "nope", 0, 1, 1}}, {kInf}), InputError);
    CHECK_THROWS_AS(characterize(m, plan, {{AxisKind::LoadIncrease, "load", 0, 2, 1}}, {kInf}), InputError);
    CHECK_THROWS_AS(characterize(m, plan, {{AxisKind::DgCapacityLoss, "dg", 0, 1, -1}}, {kInf}), InputError);
    CHECK_THROWS_AS(characterize(m, plan,
                                 {{AxisKind::DgCapacityLoss, "dg", 0, 1, 1}, {AxisKind::LoadIncrease, "load", 0, 1, -1}},
                                 {kInf, kInf}),
                    MixedDirectionAxes);
}

TEST_CASE("six bus polytope: vertices, maximality, samples") {
    SixBus f;
    const auto axes = f.axes(1, 2);
    RecourseModel rm(f.m, f.plan, axes, {kInf, kInf, kInf});
    auto poly = characterize(f.m, f.plan, axes, {kInf, kInf, kInf});
    REQUIRE(poly.dim() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        INFO(axes[i].label());
        CHECK(poly.alpha_w[i] > 1.0);
        CHECK(poly.certified[i]);
        // vertices satisfy every row through the forward evaluation
        CHECK(rm.check(poly.vertices[i + 1], 1e-7).feasible(1e-7));
        // one kW past the vertex breaks something
        Point beyond(3, 0.0);
        beyond[i] = poly.alpha_w[i] + 1e3;
        CHECK_FALSE(rm.check(beyond, 1e-7).feasible(1e-7));
    }
    CHECK(rm.check(poly.vertices[0], 1e-7).feasible(1e-7));

    // forward evaluation agrees with the LP solve at an interior point
    Point mid{poly.alpha_w[0] / 3, poly.alpha_w[1] / 3, poly.alpha_w[2] / 4};
    auto sol = lp::solve(rm.fixed_problem(mid));
    REQUIRE(sol.optimal());
    auto fw = rm.forward(mid);
    double dmax = 0;
    for (std::size_t j = 0; j < fw.size(); ++j) dmax = std::max(dmax, std::abs(fw[j] - sol.values[j]));
    CHECK(dmax < 1e-7);

    auto pts = sample(poly, 7, 200);
    CHECK(pts == sample(poly, 7, 200));
    CHECK(pts != sample(poly, 8, 200));
    for (const auto& p : pts) {
        CHECK(contains(poly, p));
        CHECK(rm.check(p, 1e-7).feasible(1e-7));
    }
    CHECK(contains(poly, poly.vertices[0]));
    CHECK(contains(poly, poly.vertices[1]));
    Point out = poly.vertices[1];
    out[0] += 1e-3 * 1e6;
    CHECK_FALSE(contains(poly, out));
}

TEST_CASE("sampled events simulate cleanly") {
    SixBus f;
    // a multi-step window couples SoC across steps
    const auto axes = f.axes(1, 3);
    auto poly = characterize(f.m, f.plan, axes, {kInf, kInf, kInf});
    for (const auto& p : sample(poly, 3, 100)) {
        auto tr = sim::run_simulation(f.m, f.plan, timeline_for(f.m, poly, p));
        auto rep = sim::violation_report(tr);
        CHECK(rep.clean());
        for (auto& s : tr.steps)
            for (std::size_t d = 0; d < f.m.storage.size(); ++d) {
                CHECK(s.soc_end_wh[d] >= f.m.storage[d].energy_min_wh - 1e-3);
                CHECK(s.soc_end_wh[d] <= f.m.storage[d].energy_max_wh + 1e-3);
            }
    }
    // well past a vertex the simulator reports trouble
    Point big(3, 0.0);
    big[0] = poly.alpha_w[0] * 1.5 + 1e5;
    auto tr = sim::run_simulation(f.m, f.plan, timeline_for(f.m, poly, big));
    CHECK_FALSE(sim::violation_report(tr).clean());
}

TEST_CASE("targeting the only reserve holder leaves nothing to recover with") {
    auto m = fixtures::six_bus();
    robust::UncertaintyBox box(m);
    box.set_si({ParamKind::LoadDesired, 0, 1}, m.loads[0].p_des_w[1], 1.2 * m.loads[0].p_des_w[1]);
    dispatch::CostConfig c;
    auto plan = robust::solve_robust(m, c, robust::ReserveCosts::scaled(c), box);
    REQUIRE(plan.optimal());
    auto [up, dn] = robust::reserve_margin(plan, 1);
    REQUIRE(plan.reserves.dg_up[0][1] == doctest::Approx(up));
    std::vector<AdversarialAxis> ld{{AxisKind::LoadIncrease, "ld3", 1, 2, 1}};
    CHECK(characterize(m, plan, ld, {kInf}).alpha_w[0] == doctest::Approx(up).epsilon(1e-6));
    // adding a dg1 axis takes dg1 out of the pool for the whole window
    ld.push_back({AxisKind::DgCapacityLoss, "dg1", 1, 2, 1});
    auto poly = characterize(m, plan, ld, {kInf, kInf});
    CHECK(poly.alpha_w[0] == doctest::Approx(0).epsilon(1e-9));
    CHECK(poly.alpha_w[1] == doctest::Approx(0).epsilon(1e-9));
}

TEST_CASE("two dimensional projection") {
    InnerPolytope p;
    p.axes = {{AxisKind::LoadIncrease, "a", 0, 1, 1}, {AxisKind::LoadIncrease, "b", 0, 1, 1}};
    p.alpha_w = {3.0, 2.0};
    p.vertices = {{0, 0}, {3, 0}, {0, 2}};
    auto poly = project_2d(p, 0, 1);
    REQUIRE(poly.vertices.size() == 3);
    CHECK_FALSE(poly.degenerate);
    CHECK(poly.area() == doctest::Approx(3.0));
    // counter-clockwise from the lowest-leftmost point
    CHECK(poly.vertices[0] == std::make_pair(0.0, 0.0));
    CHECK(poly.vertices[1] == std::make_pair(3.0, 0.0));
    CHECK(poly.vertices[2] == std::make_pair(0.0, 2.0));
    auto swapped = project_2d(p, 1, 0);
    CHECK(swapped.area() == doctest::Approx(poly.area()));

    p.alpha_w = {3.0, 0.0};
    p.vertices = {{0, 0}, {3, 0}, {0, 0}};
    auto seg = project_2d(p, 0, 1);
    CHECK(seg.degenerate);
    CHECK(seg.vertices.size() == 2);
    CHECK(point_in_polygon(seg, 1.5, 0.0));
    CHECK_FALSE(point_in_polygon(seg, 1.5, 0.1));
}

TEST_CASE("projected polygon holds the samples") {
    SixBus f;
    auto poly = characterize(f.m, f.plan, f.axes(1, 2), {kInf, kInf, kInf});
    for (auto [i, j] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}}) {
        auto pg = project_2d(poly, i, j);
        for (const auto& s : sample(poly, 5, 100)) CHECK(point_in_polygon(pg, s[i], s[j], 1e-6));
    }
}

TEST_CASE("robust plan recovers at every sampled box vertex") {
    auto m = fixtures::six_bus();
    robust::UncertaintyBox box(m);
    const double S = box.scale();
    for (int k = 0; k < m.steps; ++k) {
        box.set_si({ParamKind::LoadDesired, 0, k}, m.loads[0].p_des_w[k], 1.2 * m.loads[0].p_des_w[k]);
        box.set_si({ParamKind::LoadDesired, 3, k}, 0.9 * m.loads[3].p_des_w[k], 1.1 * m.loads[3].p_des_w[k]);
        box.set_si({ParamKind::PvForecast, 0, k}, 0.8 * m.pv[0].forecast_w[k], m.pv[0].forecast_w[k]);
    }
    dispatch::CostConfig c;
    auto plan = robust::solve_robust(m, c, robust::ReserveCosts::scaled(c), box);
    REQUIRE(plan.optimal());

    flow::NamespaceOptions nso;
    nso.phase_exchange = true;
    flow::VariableNamespace ns(m, nso);
    flow::FlowOptions fo;
    fo.terminal_soc = false;
    std::vector<double> e0;
    for (const auto& e : plan.dispatch.soc_wh) e0.push_back(e.at(0));
    flow::ConstraintBlock rows = flow::emit_voltage_drop(m, ns);
    rows.append(flow::emit_power_balance(m, ns));
    rows.append(flow::emit_voltage_limits(m, ns));
    rows.append(flow::emit_line_limits(m, ns, fo));
    rows.append(flow::emit_pv_cap(m, ns, fo));
    rows.append(flow::emit_dg_cap(m, ns, fo));
    rows.append(flow::emit_storage(m, ns, fo, &e0));
    rows.append(flow::emit_curtailment_bounds(m, ns));
    rows.append(flow::emit_power_factor(m, ns, fo));

    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        std::map<flow::ParamId, double> w;
        for (const auto& [id, iv] : box.entries()) w[id] = iv.width() > 0 && (rng() & 1) ? iv.hi : iv.lo;
        lp::LinearProgram lp;
        ns.declare(lp);
        flow::lower_into(lp, rows, [&](flow::ParamId id) { return flow::ParamExpr{w.at(id), {}}; });
        auto x = realize_point(m, plan, ns, lp.num_variables(), [&](int k) {
            auto d = sim::StepDisturbance::none(m);
            for (std::size_t j = 0; j < m.loads.size(); ++j) {
                const flow::ParamId id{ParamKind::LoadDesired, static_cast<int>(j), k};
                d.load_delta[j] = (w.at(id) - box.at(id).nom) * S;
                d.load_impaired[j] = robust::impaired(box, ParamKind::LoadDesired, j, k);
            }
            for (std::size_t j = 0; j < m.pv.size(); ++j)
                d.pv_impaired[j] = robust::impaired(box, ParamKind::PvForecast, j, k);
            for (std::size_t j = 0; j < m.dg.size(); ++j)
                d.dg_impaired[j] = robust::impaired(box, ParamKind::DgCapacity, j, k);
            return d;
        });
        auto rep = lp::check_feasibility(lp, x, 1e-7);
        CAPTURE(trial);
        CHECK(rep.feasible(1e-7));
    }
}

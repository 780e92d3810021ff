#include <cmath>
#include <numeric>

#include "doctest.h"
#include "fixtures.hpp"
#include "mgres/sim/simulate.hpp"
#include "mgres/util/errors.hpp"

using namespace mgres;
using namespace mgres::sim;
using robust::ParamKind;

namespace {

robust::RobustResult six_bus_plan(const grid::NetworkModel& m) {
    robust::UncertaintyBox box(m);
    for (int k = 0; k < m.steps; ++k) {
        const auto& ld = m.loads[0];
        box.set_si({ParamKind::LoadDesired, 0, k}, ld.p_des_w[k], 1.2 * ld.p_des_w[k]);
    }
    dispatch::CostConfig c;
    auto r = robust::solve_robust(m, c, robust::ReserveCosts::scaled(c), box);
    REQUIRE(r.optimal());
    return r;
}

double scheduled_demand(const robust::RobustResult& p, int k) {
    double s = 0;
    for (const auto& ld : p.dispatch.load) s += ld.total_p(k);
    return s;
}

Event ev(double minute, EventKind kind, std::string target, std::optional<double> mag = std::nullopt) {
    return {minute, kind, std::move(target), mag};
}

}  // namespace

TEST_CASE("proportional dispatch") {
    std::vector<double> caps{1.0, 0.5};
    auto d = proportional_dispatch(0.6, caps);
    CHECK(d.amount[0] == doctest::Approx(0.4));
    CHECK(d.amount[1] == doctest::Approx(0.2));
    CHECK(d.delivered == doctest::Approx(0.6));
    CHECK(d.shortfall == 0.0);

    auto z = proportional_dispatch(0.0, caps);
    CHECK(z.amount == std::vector<double>{0.0, 0.0});
    CHECK(z.delivered == 0.0);

    auto big = proportional_dispatch(2.0, caps);
    CHECK(big.amount[0] == doctest::Approx(1.0));
    CHECK(big.amount[1] == doctest::Approx(0.5));
    CHECK(big.shortfall == doctest::Approx(0.5));

    std::vector<double> none{0.0, 0.0};
    auto e = proportional_dispatch(0.3, none);
    CHECK(e.delivered == 0.0);
    CHECK(e.shortfall == doctest::Approx(0.3));

    std::vector<double> bad{1.0, -0.1};
    CHECK_THROWS(proportional_dispatch(0.1, bad));
}

TEST_CASE("empty timeline reproduces the schedule") {
    auto m = fixtures::six_bus();
    auto plan = six_bus_plan(m);
    auto tr = run_simulation(m, plan, {});
    REQUIRE(tr.steps.size() == static_cast<std::size_t>(m.steps));
    CHECK(violation_report(tr).clean());
    for (int k = 0; k < m.steps; ++k) {
        const auto& s = tr.steps[k];
        CHECK(s.minute == doctest::Approx(15.0 * k));
        CHECK(s.imbalance_w == 0.0);
        CHECK(s.delivered_w == 0.0);
        CHECK(s.shortfall_w == 0.0);
        CHECK(s.dg_w == doctest::Approx(plan.dispatch.dg[0].total_p(k)));
        CHECK(s.pv_w == doctest::Approx(plan.dispatch.pv[0].total_p(k)));
        CHECK(s.demand_w == doctest::Approx(scheduled_demand(plan, k)));
        for (double d : s.deploy_w) CHECK(d == 0.0);
        CHECK(s.soc_end_wh[0] == doctest::Approx(plan.dispatch.soc_wh[0][k + 1]).epsilon(1e-12));
        for (std::size_t b = 0; b < s.w.size(); ++b)
            for (int ph = 0; ph < 3; ++ph)
                if (plan.dispatch.w[b][k][ph] > 0) CHECK(s.w[b][ph] == doctest::Approx(plan.dispatch.w[b][k][ph]));
    }
}

TEST_CASE("load mask within the reserve is absorbed") {
    auto m = fixtures::six_bus();
    auto plan = six_bus_plan(m);
    const double rsv = plan.reserves.dg_up[0][1];
    REQUIRE(rsv > 40e3);
    EventTimeline tl{{ev(15, EventKind::LoadMaskStart, "ld3", 30e3), ev(30, EventKind::LoadMaskEnd, "ld3")}};
    auto tr = run_simulation(m, plan, tl);
    CHECK(violation_report(tr).clean());
    const auto& s = tr.steps[1];
    CHECK(s.imbalance_w == doctest::Approx(30e3));
    CHECK(s.pool_w == doctest::Approx(rsv));
    CHECK(s.delivered_w == doctest::Approx(30e3));
    CHECK(s.shortfall_w == 0.0);
    CHECK(s.dg_w == doctest::Approx(plan.dispatch.dg[0].total_p(1) + 30e3));
    // steps outside the window are untouched
    CHECK(tr.steps[0].imbalance_w == 0.0);
    CHECK(tr.steps[2].imbalance_w == 0.0);
}

TEST_CASE("balance and SoC bookkeeping under events") {
    auto m = fixtures::six_bus();
    auto plan = six_bus_plan(m);
    const double dt_h = m.dt_minutes / 60.0;
    std::vector<EventTimeline> cases{
        {{ev(0, EventKind::LoadMaskStart, "ld5", 50e3), ev(45, EventKind::LoadMaskEnd, "ld5")}},
        {{ev(15, EventKind::PvLoss, "pv1", 80e3), ev(45, EventKind::PvRestore, "pv1")}},
        {{ev(15, EventKind::DgTrip, "dg1"), ev(30, EventKind::DgRestore, "dg1")}},
        {{ev(0, EventKind::LoadMaskStart, "ld4", -20e3), ev(15, EventKind::DgTrip, "dg1", 100e3),
          ev(30, EventKind::DgRestore, "dg1"), ev(60, EventKind::LoadMaskEnd, "ld4")}},
    };
    for (std::size_t c = 0; c < cases.size(); ++c) {
        CAPTURE(c);
        auto tr = run_simulation(m, plan, cases[c]);
        double soc = plan.dispatch.soc_wh[0][0];
        for (int k = 0; k < m.steps; ++k) {
            const auto& s = tr.steps[k];
            CHECK(s.delivered_w + s.shortfall_w == doctest::Approx(std::abs(s.imbalance_w)));
            CHECK(s.delivered_w <= s.pool_w + 1e-6);
            // deficits that reserves cannot cover show up as unmet demand, surpluses as spilled generation
            const double net_sched = plan.dispatch.dg[0].total_p(k) + plan.dispatch.pv[0].total_p(k) +
                                     plan.dispatch.es[0].total_p(k) - scheduled_demand(plan, k);
            const double signed_short = s.imbalance_w >= 0 ? -s.shortfall_w : s.shortfall_w;
            CHECK(s.realized_gen_w - s.demand_w == doctest::Approx(net_sched + signed_short).epsilon(1e-9));
            const double deployed = std::accumulate(s.deploy_w.begin(), s.deploy_w.end(), 0.0);
            CHECK(std::abs(deployed) == doctest::Approx(s.delivered_w));
            CHECK(std::abs(s.soc_start_wh[0] - soc) < 1e-9);
            soc -= dt_h * s.es_p_w[0];
            CHECK(std::abs(s.soc_end_wh[0] - soc) < 1e-9);
        }
    }
}

TEST_CASE("oversized event leaves a shortfall") {
    auto m = fixtures::six_bus();
    auto plan = six_bus_plan(m);
    EventTimeline tl{{ev(15, EventKind::DgTrip, "dg1"), ev(30, EventKind::DgRestore, "dg1")}};
    auto tr = run_simulation(m, plan, tl);
    const auto& s = tr.steps[1];
    // a full trip takes the scheduled output and the unit out of the pool
    CHECK(s.gen_loss_w == doctest::Approx(plan.dispatch.dg[0].total_p(1)));
    CHECK(s.pool_w == doctest::Approx(0.0));
    CHECK(s.shortfall_w == doctest::Approx(s.imbalance_w));
    auto rep = violation_report(tr);
    CHECK(rep.count[static_cast<int>(ViolationClass::Balance)] == 1);
    CHECK(rep.max[static_cast<int>(ViolationClass::Balance)] == doctest::Approx(s.shortfall_w));
}

TEST_CASE("violation report recounts the trajectory") {
    auto m = fixtures::six_bus();
    auto plan = six_bus_plan(m);
    EventTimeline tl{{ev(0, EventKind::DgTrip, "dg1"), ev(0, EventKind::LoadMaskStart, "ld5", 400e3),
                      ev(60, EventKind::DgRestore, "dg1"), ev(60, EventKind::LoadMaskEnd, "ld5")}};
    auto tr = run_simulation(m, plan, tl);
    auto rep = violation_report(tr);
    REQUIRE_FALSE(rep.clean());
    std::array<int, static_cast<int>(ViolationClass::Count)> n{};
    std::array<double, static_cast<int>(ViolationClass::Count)> mx{};
    for (const auto& v : tr.violations) {
        CHECK(v.amount > 0);
        ++n[static_cast<int>(v.cls)];
        mx[static_cast<int>(v.cls)] = std::max(mx[static_cast<int>(v.cls)], v.amount);
    }
    CHECK(rep.count == n);
    CHECK(rep.max == mx);
    CHECK(rep.total() == static_cast<int>(tr.violations.size()));
}

TEST_CASE("timeline validation") {
    auto m = fixtures::six_bus();
    auto bad = [&](std::vector<Event> e) { CHECK_THROWS_AS(event_windows(m, {e}), InputError); };
    bad({ev(20, EventKind::DgTrip, "dg1"), ev(10, EventKind::DgRestore, "dg1")});
    bad({ev(10, EventKind::DgTrip, "nope"), ev(20, EventKind::DgRestore, "nope")});
    bad({ev(10, EventKind::DgTrip, "ld1"), ev(20, EventKind::DgRestore, "ld1")});
    bad({ev(10, EventKind::LoadMaskStart, "ld1"), ev(20, EventKind::LoadMaskEnd, "ld1")});
    bad({ev(10, EventKind::DgTrip, "dg1"), ev(15, EventKind::DgTrip, "dg1"), ev(20, EventKind::DgRestore, "dg1")});
    bad({ev(10, EventKind::DgRestore, "dg1")});
    bad({ev(10, EventKind::PvLoss, "pv1")});
    bad({ev(NAN, EventKind::DgTrip, "dg1"), ev(20, EventKind::DgRestore, "dg1")});
    CHECK_THROWS_AS(event_kind_from("dg_explode"), InputError);
    CHECK(event_kind_from("load_mask_start") == EventKind::LoadMaskStart);

    auto w = event_windows(m, {{ev(20, EventKind::DgTrip, "dg1"), ev(30, EventKind::LoadMaskStart, "ld3", 1e3),
                                ev(40, EventKind::DgRestore, "dg1"), ev(50, EventKind::LoadMaskEnd, "ld3")}});
    REQUIRE(w.size() == 2);
    // steps start at 0, 15, 30, 45: the trip covers 30 only, the mask 30 and 45
    auto plan = six_bus_plan(m);
    CHECK(disturbance_at(m, plan.dispatch, w, 1).imbalance() == 0.0);
    CHECK(disturbance_at(m, plan.dispatch, w, 2).dg_impaired[0]);
    CHECK_FALSE(disturbance_at(m, plan.dispatch, w, 3).dg_impaired[0]);
    CHECK(disturbance_at(m, plan.dispatch, w, 3).load_delta[1] == doctest::Approx(1e3));
}

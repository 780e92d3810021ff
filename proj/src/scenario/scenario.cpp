#include "mgres/scenario/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <limits>

#include "mgres/grid/io.hpp"
#include "mgres/grid/validate.hpp"
#include "mgres/util/errors.hpp"
#include "mgres/util/io.hpp"
#include "mgres/util/json_fields.hpp"
#include "mgres/util/rng.hpp"

namespace mgres::scenario {

namespace fs = std::filesystem;
using nlohmann::json;
using robust::ParamKind;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string resolve(const std::string& base_dir, const std::string& p) {
    fs::path q(p);
    if (q.is_absolute() || base_dir.empty()) return q.lexically_normal().string();
    return (fs::path(base_dir) / q).lexically_normal().string();
}

std::pair<int, int> step_span(const json& obj, int steps, const std::string& where) {
    if (!obj.contains("steps")) return {0, steps};
    const auto& s = obj.at("steps");
    if (s.is_number_integer()) {
        const int k = s.get<int>();
        return {k, k + 1};
    }
    if (!s.is_array() || s.size() != 2 || !s[0].is_number_integer() || !s[1].is_number_integer())
        throw InputError(where + ".steps", "expected a step index or a [first, end) pair");
    return {s[0].get<int>(), s[1].get<int>()};
}

void check_span(std::pair<int, int> sp, int steps, const std::string& where) {
    if (sp.first < 0 || sp.second > steps || sp.first >= sp.second)
        throw InputError(where + ".steps", "span [" + std::to_string(sp.first) + ", " + std::to_string(sp.second) +
                                               ") is outside the horizon of " + std::to_string(steps) + " steps");
}

std::pair<double, double> pair_of(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) return {0.0, 0.0};
    const auto& v = obj.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw InputError(where + "." + key, "expected [lo, hi]");
    const double lo = v[0].get<double>(), hi = v[1].get<double>();
    if (!(lo <= 0.0) || !(hi >= 0.0))
        throw InputError(where + "." + key, "interval must contain the nominal value (lo <= 0 <= hi)");
    return {lo, hi};
}

int entity_index(const grid::NetworkModel& m, ParamKind k, const std::string& id) {
    switch (k) {
        case ParamKind::DgCapacity: return m.dg_index(id);
        case ParamKind::LoadDesired: return m.load_index(id);
        case ParamKind::PvForecast: return m.pv_index(id);
    }
    return -1;
}

}  // namespace

ParamKind param_kind_from(const std::string& s, const std::string& where) {
    for (auto k : {ParamKind::DgCapacity, ParamKind::LoadDesired, ParamKind::PvForecast})
        if (s == flow::to_string(k)) return k;
    throw InputError(where, "unknown parameter '" + s + "' (dg_capacity, load_desired, pv_forecast)");
}

void draw_initial_soc(grid::NetworkModel& m, std::uint64_t seed, double lo, double hi) {
    if (!(0.0 <= lo && lo <= hi && hi <= 1.0)) throw InputError("initial_soc", "need 0 <= lo <= hi <= 1");
    RngStream rng(seed, "initial_soc");
    for (auto& u : m.storage) u.initial_wh = u.energy_min_wh + rng.uniform(lo, hi) * (u.energy_max_wh - u.energy_min_wh);
}

grid::SynthSpec synth_spec_from_json(const json& j, const std::string& where) {
    using namespace jf;
    grid::SynthSpec s;
    if (!j.is_object()) throw InputError(where, "expected an object");
    s.name = str_or(j, "name", s.name, where);
    s.buses = static_cast<int>(integer_or(j, "buses", s.buses, where));
    s.trunk_buses = static_cast<int>(integer_or(j, "trunk_buses", s.trunk_buses, where));
    s.seed = static_cast<std::uint64_t>(integer_or(j, "seed", static_cast<long long>(s.seed), where));
    s.peak_load_w = num_or(j, "peak_load_w", s.peak_load_w, where);
    s.peak_load_var = num_or(j, "peak_load_var", s.peak_load_var, where);
    s.min_load_fraction = num_or(j, "min_load_fraction", s.min_load_fraction, where);
    if (j.contains("dg")) {
        s.dg.clear();
        const auto& dg = array(j, "dg", where);
        for (std::size_t i = 0; i < dg.size(); ++i)
            s.dg.emplace_back(str(dg[i], "id", at(where + ".dg", i)), num(dg[i], "capacity_va", at(where + ".dg", i)));
    }
    s.pv_total_va = num_or(j, "pv_total_va", s.pv_total_va, where);
    s.pv_units = static_cast<int>(integer_or(j, "pv_units", s.pv_units, where));
    s.es_power_w = num_or(j, "es_power_w", s.es_power_w, where);
    s.es_energy_wh = num_or(j, "es_energy_wh", s.es_energy_wh, where);
    s.es_units = static_cast<int>(integer_or(j, "es_units", s.es_units, where));
    s.es_inverter_ratio = num_or(j, "es_inverter_ratio", s.es_inverter_ratio, where);
    s.es_initial_fraction = num_or(j, "es_initial_fraction", s.es_initial_fraction, where);
    s.es_min_fraction = num_or(j, "es_min_fraction", s.es_min_fraction, where);
    if (j.contains("base")) {
        s.base.kv_ll = num_or(j.at("base"), "kv_ll", s.base.kv_ll, where + ".base");
        s.base.mva = num_or(j.at("base"), "mva", s.base.mva, where + ".base");
    }
    s.steps = static_cast<int>(integer_or(j, "steps", s.steps, where));
    s.dt_minutes = num_or(j, "dt_minutes", s.dt_minutes, where);
    s.start_minute = num_or(j, "start_minute", s.start_minute, where);
    auto shape = [&](const char* key) {
        std::vector<double> v;
        const auto& a = array(j, key, where);
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (!a[i].is_number()) throw InputError(at(where + "." + key, i), "expected a number");
            v.push_back(a[i].get<double>());
        }
        return v;
    };
    s.load_shape = shape("load_shape");
    s.pv_shape = shape("pv_shape");
    s.trunk_r_ohm = num_or(j, "trunk_r_ohm", s.trunk_r_ohm, where);
    s.trunk_x_ohm = num_or(j, "trunk_x_ohm", s.trunk_x_ohm, where);
    s.lateral_r_ohm = num_or(j, "lateral_r_ohm", s.lateral_r_ohm, where);
    s.lateral_x_ohm = num_or(j, "lateral_x_ohm", s.lateral_x_ohm, where);
    s.trunk_limit_va = num_or(j, "trunk_limit_va", s.trunk_limit_va, where);
    s.lateral_limit_va = num_or(j, "lateral_limit_va", s.lateral_limit_va, where);
    return s;
}

Scenario scenario_from_json(const json& j, const std::string& path, const Overrides& ov) {
    using namespace jf;
    const std::string W = "scenario";
    Scenario sc;
    sc.path = path;
    if (!j.is_object()) throw InputError(W, "expected an object");
    const long long ver = integer(j, "schema_version", W);
    if (ver != kScenarioSchemaVersion)
        throw InputError(W + ".schema_version", "unsupported version " + std::to_string(ver) + " (expected " +
                                                    std::to_string(kScenarioSchemaVersion) + ")");
    const std::string dir = path.empty() ? std::string() : fs::path(path).parent_path().string();
    if (!path.empty()) sc.inputs.push_back(path);
    sc.name = str_or(j, "name", path.empty() ? "scenario" : fs::path(path).stem().string(), W);

    const auto& net = field(j, "network", W);
    if (net.is_string()) {
        const auto np = resolve(dir, net.get<std::string>());
        sc.inputs.push_back(np);
        sc.model = grid::load_network(np);
    } else if (net.is_object()) {
        sc.model = grid::network_from_json(net, W + ".network");
    } else {
        throw InputError(W + ".network", "expected a file path or an inline network object");
    }
    if (j.contains("profiles")) {
        const auto pp = resolve(dir, str(j, "profiles", W));
        sc.inputs.push_back(pp);
        grid::load_profiles(sc.model, pp);
    }
    auto& m = sc.model;

    const long long seed = integer_or(j, "seed", 1, W);
    if (seed < 0) throw InputError(W + ".seed", "must be >= 0");
    sc.seed = ov.seed ? *ov.seed : static_cast<std::uint64_t>(seed);

    if (j.contains("costs")) {
        const auto& c = j.at("costs");
        sc.costs.c1 = num_or(c, "c1", sc.costs.c1, W + ".costs");
        sc.costs.c2 = num_or(c, "c2", sc.costs.c2, W + ".costs");
        sc.costs.c3 = num_or(c, "c3", sc.costs.c3, W + ".costs");
    }
    sc.costs.validate();
    sc.reserve_costs = robust::ReserveCosts::scaled(sc.costs);
    if (j.contains("reserve_costs")) {
        const auto& c = j.at("reserve_costs");
        const std::string w = W + ".reserve_costs";
        auto& r = sc.reserve_costs;
        r.dg = num_or(c, "dg", r.dg, w);
        r.pv = num_or(c, "pv", r.pv, w);
        r.es = num_or(c, "es", r.es, w);
        r.load = num_or(c, "load", r.load, w);
    }
    sc.reserve_costs.validate();

    auto& flow = sc.options.base.flow;
    auto& solver = sc.options.base.solver;
    if (j.contains("options")) {
        const auto& o = j.at("options");
        const std::string w = W + ".options";
        flow.poly_sides = static_cast<int>(integer_or(o, "poly_sides", flow.poly_sides, w));
        flow.power_factor = boolean_or(o, "pv_power_factor", flow.power_factor, w);
        flow.pv_min_pf = num_or(o, "pv_min_pf", flow.pv_min_pf, w);
        flow.terminal_soc = boolean_or(o, "terminal_soc", flow.terminal_soc, w);
        solver.feas_tol = num_or(o, "feas_tol", solver.feas_tol, w);
        sc.options.worst_case_objective = boolean_or(o, "worst_case_objective", false, w);
        sc.certify_eps_w = num_or(o, "certify_eps_w", sc.certify_eps_w, w);
        if (!(sc.certify_eps_w > 0)) throw InputError(w + ".certify_eps_w", "must be > 0");
    }
    if (ov.poly_sides) flow.poly_sides = *ov.poly_sides;
    if (ov.feas_tol) solver.feas_tol = *ov.feas_tol;
    if (flow.poly_sides < 4) throw InputError("poly_sides", "need at least 4 sides");
    if (!(solver.feas_tol > 0 && solver.feas_tol < 1e-2)) throw InputError("feas_tol", "must lie in (0, 1e-2)");
    sc.sim_tol = solver.feas_tol;

    if (j.contains("initial_soc")) {
        const auto& s = j.at("initial_soc");
        const std::string w = W + ".initial_soc";
        const auto mode = str(s, "mode", w);
        if (mode == "random") {
            sc.initial_soc.random = true;
            sc.initial_soc.lo = num_or(s, "lo", sc.initial_soc.lo, w);
            sc.initial_soc.hi = num_or(s, "hi", sc.initial_soc.hi, w);
        } else if (mode != "network") {
            throw InputError(w + ".mode", "expected 'network' or 'random'");
        }
    }
    if (sc.initial_soc.random) draw_initial_soc(m, sc.seed, sc.initial_soc.lo, sc.initial_soc.hi);

    grid::require_valid(m);

    const auto& unc = array(j, "uncertainty", W);
    for (std::size_t i = 0; i < unc.size(); ++i) {
        const std::string w = at(W + ".uncertainty", i);
        BoxEntry e;
        e.kind = param_kind_from(str(unc[i], "param", w), w + ".param");
        e.entity = str(unc[i], "entity", w);
        if (entity_index(m, e.kind, e.entity) < 0) throw InputError(w + ".entity", "unknown id '" + e.entity + "'");
        const auto sp = step_span(unc[i], m.steps, w);
        check_span(sp, m.steps, w);
        e.first_step = sp.first;
        e.last_step = sp.second;
        std::tie(e.rel_lo, e.rel_hi) = pair_of(unc[i], "rel", w);
        std::tie(e.delta_lo_w, e.delta_hi_w) = pair_of(unc[i], "delta_w", w);
        sc.uncertainty.push_back(e);
    }
    (void)sc.box();  // reject intervals that leave the parameter domain now, with the scenario path

    const auto& ax = array(j, "axes", W);
    for (std::size_t i = 0; i < ax.size(); ++i) {
        const std::string w = at(W + ".axes", i);
        advset::AdversarialAxis a;
        try {
            a.kind = advset::axis_kind_from(str(ax[i], "kind", w));
        } catch (const InputError& e) {
            throw InputError(w + ".kind", e.what());
        }
        a.target = str(ax[i], "target", w);
        const auto sp = step_span(ax[i], m.steps, w);
        check_span(sp, m.steps, w);
        a.first_step = sp.first;
        a.last_step = sp.second;
        a.sign = static_cast<int>(integer_or(ax[i], "sign", 1, w));
        sc.axes.push_back(a);
        const double cap = num_or(ax[i], "cap_w", kInf, w);
        if (!(cap >= 0)) throw InputError(w + ".cap_w", "must be >= 0");
        sc.axis_cap_w.push_back(cap);
    }
    const auto outer = str_or(j, "outer_box", "none", W);
    if (outer == "uncertainty") sc.caps_from_uncertainty = true;
    else if (outer != "none") throw InputError(W + ".outer_box", "expected 'none' or 'uncertainty'");

    const auto& ev = array(j, "events", W);
    for (std::size_t i = 0; i < ev.size(); ++i) {
        const std::string w = at(W + ".events", i);
        sim::Event e;
        e.minute = num(ev[i], "minute", w);
        try {
            e.kind = sim::event_kind_from(str(ev[i], "kind", w));
        } catch (const InputError& err) {
            throw InputError(w + ".kind", err.what());
        }
        e.target = str(ev[i], "target", w);
        if (ev[i].contains("magnitude_w")) e.magnitude = num(ev[i], "magnitude_w", w);
        sc.timeline.events.push_back(e);
    }
    try {
        (void)sim::event_windows(m, sc.timeline);
    } catch (const InputError& e) {
        throw InputError(W + ".events", e.what());
    }
    return sc;
}

Scenario load_scenario(const std::string& path, const Overrides& ov) {
    return scenario_from_json(parse_json_file(path), path, ov);
}

robust::UncertaintyBox Scenario::box() const {
    robust::UncertaintyBox b(model);
    const double S = b.scale();
    for (std::size_t i = 0; i < uncertainty.size(); ++i) {
        const auto& e = uncertainty[i];
        const int d = entity_index(model, e.kind, e.entity);
        for (int k = e.first_step; k < e.last_step; ++k) {
            const robust::ParamId id{e.kind, d, k};
            const double nom = b.at(id).nom;
            double lo = nom * (1.0 + e.rel_lo) + e.delta_lo_w / S;
            const double hi = nom * (1.0 + e.rel_hi) + e.delta_hi_w / S;
            // capacities and forecasts cannot go negative; a clamp here is a full outage
            if (lo < 0.0) lo = 0.0;
            b.set(id, lo, hi);
        }
    }
    return b;
}

std::vector<double> Scenario::axis_caps() const {
    auto caps = axis_cap_w;
    if (caps_from_uncertainty && !axes.empty()) {
        const auto fromb = advset::caps_from_box(model, axes, box());
        for (std::size_t i = 0; i < caps.size(); ++i) caps[i] = std::min(caps[i], fromb[i]);
    }
    return caps;
}

advset::AdvOptions Scenario::adv_options() const {
    advset::AdvOptions o;
    o.base = options.base;
    o.certify_eps_w = certify_eps_w;
    return o;
}

}  // namespace mgres::scenario

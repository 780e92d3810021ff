#include "mgres/grid/synth.hpp"

#include <cmath>
#include <cstdio>

#include "mgres/util/errors.hpp"
#include "mgres/util/rng.hpp"

namespace mgres::grid {

namespace {

std::string bus_name(int i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "b%02d", i);
    return buf;
}

std::vector<double> shape_or_flat(const std::vector<double>& s, int steps, const char* what) {
    if (s.empty()) return std::vector<double>(steps, 1.0);
    if (static_cast<int>(s.size()) != steps)
        throw InputError(what, "shape has " + std::to_string(s.size()) + " entries, horizon has " +
                                   std::to_string(steps));
    for (double v : s)
        if (!(v >= 0) || !std::isfinite(v)) throw InputError(what, "shape values must be finite and >= 0");
    return s;
}

}  // namespace

NetworkModel synth_feeder(const SynthSpec& spec) {
    if (spec.buses < 2) throw InputError("synth.buses", "a feeder needs at least 2 buses");
    if (spec.steps < 1) throw InputError("synth.steps", "horizon must have at least one step");
    if (!(spec.dt_minutes > 0)) throw InputError("synth.dt_minutes", "must be > 0");
    if (spec.peak_load_w < 0 || spec.peak_load_var < 0 || spec.pv_total_va < 0 || spec.es_power_w < 0 ||
        spec.es_energy_wh < 0)
        throw InputError("synth", "aggregate ratings must be >= 0");
    if (spec.pv_units < 0 || spec.es_units < 0) throw InputError("synth", "unit counts must be >= 0");
    if (spec.pv_total_va > 0 && spec.pv_units == 0) throw InputError("synth.pv_units", "PV rating needs units");
    if (spec.es_power_w > 0 && spec.es_units == 0) throw InputError("synth.es_units", "storage rating needs units");
    const auto load_shape = shape_or_flat(spec.load_shape, spec.steps, "synth.load_shape");
    const auto pv_shape = shape_or_flat(spec.pv_shape, spec.steps, "synth.pv_shape");
    for (double v : pv_shape)
        if (v > 1.0) throw InputError("synth.pv_shape", "PV shape cannot exceed inverter capacity (1.0)");

    RngStream rng(spec.seed, "synth");
    NetworkModel m;
    m.name = spec.name;
    m.base = spec.base;
    m.steps = spec.steps;
    m.dt_minutes = spec.dt_minutes;
    m.start_minute = spec.start_minute;
    const int trunk = std::max(2, std::min(spec.trunk_buses, spec.buses));

    auto trunk_branch = [&](int from, int to) {
        Branch br;
        br.id = "l" + bus_name(to).substr(1);
        br.from = bus_name(from);
        br.to = bus_name(to);
        br.phases = PhaseSet::abc();
        const double len = rng.uniform(0.6, 1.4);
        for (int p = 0; p < 3; ++p)
            for (int q = 0; q < 3; ++q) {
                const bool self = p == q;
                br.r_ohm[p][q] = len * spec.trunk_r_ohm * (self ? 1.0 : 0.3);
                br.x_ohm[p][q] = len * spec.trunk_x_ohm * (self ? 1.0 : 0.4);
            }
        br.flow_limit_va = spec.trunk_limit_va;
        return br;
    };

    for (int i = 0; i < trunk; ++i) m.buses.push_back({bus_name(i), PhaseSet::abc(), 0.95, 1.05});
    m.root = bus_name(0);
    for (int i = 1; i < trunk; ++i) m.branches.push_back(trunk_branch(i - 1, i));

    // laterals: the first three hang off the trunk so every phase gets one
    int next_phase = 0;
    for (int i = trunk; i < spec.buses; ++i) {
        const int lat = i - trunk;
        int parent;
        PhaseSet ph;
        if (lat >= 3 && rng.uniform() < 0.3) {
            parent = trunk + static_cast<int>(rng.index(lat));
            ph = m.buses[parent].phases;
        } else {
            parent = 1 + static_cast<int>(rng.index(trunk - 1));
            ph = PhaseSet(static_cast<std::uint8_t>(1u << next_phase));
            next_phase = (next_phase + 1) % 3;
        }
        m.buses.push_back({bus_name(i), ph, 0.95, 1.05});
        Branch br;
        br.id = "l" + bus_name(i).substr(1);
        br.from = bus_name(parent);
        br.to = bus_name(i);
        br.phases = ph;
        const int p = ph.list().front();
        const double len = rng.uniform(0.5, 1.5);
        br.r_ohm[p][p] = len * spec.lateral_r_ohm;
        br.x_ohm[p][p] = len * spec.lateral_x_ohm;
        br.flow_limit_va = spec.lateral_limit_va;
        m.branches.push_back(br);
    }

    // loads, scaled so every phase carries exactly a third of the peak
    const int laterals = spec.buses - trunk;
    const double trunk_share = laterals >= 3 ? 0.4 : 1.0;
    std::vector<double> weight(spec.buses, 0.0);
    double trunk_w = 0.0;
    std::array<double, 3> lat_w{};
    for (int i = 1; i < spec.buses; ++i) {
        weight[i] = rng.uniform(0.5, 1.5);
        if (i < trunk) trunk_w += weight[i];
        else lat_w[m.buses[i].phases.list().front()] += weight[i];
    }
    const double pf = spec.peak_load_w > 0
                          ? spec.peak_load_w / std::hypot(spec.peak_load_w, spec.peak_load_var)
                          : 1.0;
    for (int i = 1; i < spec.buses; ++i) {
        double peak;
        if (i < trunk) {
            peak = spec.peak_load_w * trunk_share * weight[i] / trunk_w;
        } else {
            if (trunk_share >= 1.0) continue;
            const int p = m.buses[i].phases.list().front();
            peak = spec.peak_load_w / 3.0 * (1.0 - trunk_share) * weight[i] / lat_w[p];
        }
        LoadPoint ld;
        ld.id = "ld" + bus_name(i).substr(1);
        ld.bus = bus_name(i);
        ld.phases = m.buses[i].phases;
        ld.power_factor = pf;
        for (int k = 0; k < spec.steps; ++k) {
            ld.p_des_w.push_back(peak * load_shape[k]);
            ld.p_min_w.push_back(peak * load_shape[k] * spec.min_load_fraction);
        }
        m.loads.push_back(std::move(ld));
    }

    auto trunk_slot = [&](int i, int offset) { return bus_name(1 + (2 * i + offset) % (trunk - 1)); };
    for (std::size_t i = 0; i < spec.dg.size(); ++i) {
        if (!(spec.dg[i].second > 0)) throw InputError("synth.dg", "DG ratings must be > 0");
        m.dg.push_back({spec.dg[i].first, trunk_slot(static_cast<int>(i), 2), PhaseSet::abc(), spec.dg[i].second});
    }
    for (int i = 0; i < spec.pv_units && spec.pv_total_va > 0; ++i) {
        PvUnit pv;
        pv.id = "pv" + std::to_string(i + 1);
        pv.bus = trunk_slot(i, 4);
        pv.phases = PhaseSet::abc();
        pv.capacity_va = spec.pv_total_va / spec.pv_units;
        for (int k = 0; k < spec.steps; ++k) pv.forecast_w.push_back(pv.capacity_va * pv_shape[k]);
        m.pv.push_back(std::move(pv));
    }
    for (int i = 0; i < spec.es_units && spec.es_power_w > 0; ++i) {
        StorageUnit es;
        es.id = "es" + std::to_string(i + 1);
        es.bus = trunk_slot(i, 1);
        es.phases = PhaseSet::abc();
        es.power_w = spec.es_power_w / spec.es_units;
        es.capacity_va = es.power_w * spec.es_inverter_ratio;
        es.energy_max_wh = spec.es_energy_wh / spec.es_units;
        es.energy_min_wh = es.energy_max_wh * spec.es_min_fraction;
        es.initial_wh = es.energy_min_wh + spec.es_initial_fraction * (es.energy_max_wh - es.energy_min_wh);
        m.storage.push_back(std::move(es));
    }
    return m;
}

}  // namespace mgres::grid

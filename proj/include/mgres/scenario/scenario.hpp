#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mgres/advset/advset.hpp"
#include "mgres/dispatch/dispatch.hpp"
#include "mgres/grid/network.hpp"
#include "mgres/grid/synth.hpp"
#include "mgres/robust/robust.hpp"
#include "mgres/sim/timeline.hpp"

namespace mgres::scenario {

inline constexpr int kScenarioSchemaVersion = 1;

// One interval family of the uncertainty box. Steps are [first, last) in
// absolute step indices; the interval is nominal * (1 + rel) + delta_w.
struct BoxEntry {
    robust::ParamKind kind = robust::ParamKind::LoadDesired;
    std::string entity;
    int first_step = 0, last_step = -1;  // -1: to the end of the horizon
    double rel_lo = 0.0, rel_hi = 0.0;
    double delta_lo_w = 0.0, delta_hi_w = 0.0;
};

struct InitialSoc {
    bool random = false;
    double lo = 0.4, hi = 0.6;  // fraction of the usable range
};

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> poly_sides;
    std::optional<double> feas_tol;
};

struct Scenario {
    std::string path;  // scenario file, as given
    std::string name;
    std::vector<std::string> inputs;  // every file read, scenario first
    grid::NetworkModel model;
    std::uint64_t seed = 1;

    dispatch::CostConfig costs;
    robust::ReserveCosts reserve_costs;
    robust::RobustOptions options;  // flow and solver options live in options.base
    double sim_tol = 1e-7;          // pu
    double certify_eps_w = 100.0;

    std::vector<BoxEntry> uncertainty;
    std::vector<advset::AdversarialAxis> axes;
    std::vector<double> axis_cap_w;  // inf when unbounded
    bool caps_from_uncertainty = false;
    sim::EventTimeline timeline;
    InitialSoc initial_soc;

    robust::UncertaintyBox box() const;
    // Per-axis outer extents, explicit caps first, then the box when asked for.
    std::vector<double> axis_caps() const;
    advset::AdvOptions adv_options() const;
};

// Relative paths inside the scenario resolve against the scenario's directory.
Scenario load_scenario(const std::string& path, const Overrides& ov = {});
Scenario scenario_from_json(const nlohmann::json& j, const std::string& path, const Overrides& ov = {});

grid::SynthSpec synth_spec_from_json(const nlohmann::json& j, const std::string& where = "synth");

// Seeded draw of each storage unit's starting energy (stream "initial_soc").
void draw_initial_soc(grid::NetworkModel& m, std::uint64_t seed, double lo, double hi);

robust::ParamKind param_kind_from(const std::string& s, const std::string& where);

}  // namespace mgres::scenario

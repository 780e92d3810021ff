#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mgres/grid/network.hpp"

namespace mgres::grid {

struct SynthSpec {
    std::string name = "ieee123-like";
    int buses = 24;
    int trunk_buses = 8;  // three-phase spine including the root; the rest are single-phase laterals
    std::uint64_t seed = 1;

    double peak_load_w = 3.5e6;
    double peak_load_var = 1.9e6;
    double min_load_fraction = 0.6;  // critical share of desired load

    std::vector<std::pair<std::string, double>> dg{{"dg65", 1.0e6}, {"dg76", 0.6e6}, {"dg47", 0.5e6},
                                                   {"dg100", 0.4e6}};
    double pv_total_va = 1.77e6;
    int pv_units = 3;
    double es_power_w = 1.5e6;
    double es_energy_wh = 6.0e6;
    int es_units = 3;
    double es_inverter_ratio = 1.2;  // inverter VA over power rating
    double es_initial_fraction = 0.5;  // of the usable range
    double es_min_fraction = 0.1;      // energy_min over energy_max

    Base base;
    int steps = 6;
    double dt_minutes = 10.0;
    double start_minute = 0.0;
    // Per-step multipliers; empty means flat 1.0. Load shape scales peak load,
    // PV shape scales inverter capacity.
    std::vector<double> load_shape;
    std::vector<double> pv_shape;

    double trunk_r_ohm = 0.012;  // self impedance per trunk segment
    double trunk_x_ohm = 0.024;
    double lateral_r_ohm = 0.02;
    double lateral_x_ohm = 0.02;
    double trunk_limit_va = 2.0e6;  // per phase
    double lateral_limit_va = 0.8e6;
};

// Deterministic radial feeder with the requested aggregate ratings. Throws
// InputError on an unrealizable spec.
NetworkModel synth_feeder(const SynthSpec& spec);

}  // namespace mgres::grid

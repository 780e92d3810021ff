#pragma once

#include <string>

#include "mgres/grid/io.hpp"
#include "mgres/grid/network.hpp"

namespace fixtures {

inline std::string data_path(const std::string& rel) { return std::string(MGRES_DATA_DIR) + "/" + rel; }

inline mgres::grid::NetworkModel six_bus() {
    auto m = mgres::grid::load_network(data_path("networks/six_bus.json"));
    mgres::grid::load_profiles(m, data_path("profiles/six_bus.csv"));
    return m;
}

// One three-phase bus carrying a DG and a load, single step of one hour.
inline mgres::grid::NetworkModel single_bus(double dg_w, double load_des_w, double load_min_w) {
    using namespace mgres::grid;
    NetworkModel m;
    m.steps = 1;
    m.dt_minutes = 60;
    m.buses.push_back({"bus", PhaseSet::abc()});
    if (dg_w > 0) m.dg.push_back({"dg", "bus", PhaseSet::abc(), dg_w});
    LoadPoint ld;
    ld.id = "load";
    ld.bus = "bus";
    ld.phases = PhaseSet::abc();
    ld.power_factor = 1.0;
    ld.p_des_w = {load_des_w};
    ld.p_min_w = {load_min_w};
    m.loads.push_back(ld);
    return m;
}

}  // namespace fixtures

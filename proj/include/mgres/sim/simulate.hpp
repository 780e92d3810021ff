#pragma once

#include <array>
#include <string>
#include <vector>

#include "mgres/grid/network.hpp"
#include "mgres/robust/robust.hpp"
#include "mgres/sim/controller.hpp"
#include "mgres/sim/timeline.hpp"

namespace mgres::sim {

enum class ViolationClass { Voltage, Soc, Line, Device, Balance, Count };
const char* to_string(ViolationClass c);

struct Violation {
    ViolationClass cls;
    int step;            // absolute step
    std::string entity;  // bus, branch or device id, with phase suffix when per phase
    double amount;       // by how much the limit is exceeded (pu^2 for voltage, W / VA / Wh otherwise)
};

struct StepRecord {
    int step = 0;
    double minute = 0.0;
    double imbalance_w = 0.0, pool_w = 0.0, delivered_w = 0.0, shortfall_w = 0.0;
    double scheduled_gen_w = 0.0;
    double gen_loss_w = 0.0, load_delta_w = 0.0;
    double pv_w = 0.0, dg_w = 0.0, es_w = 0.0;  // realized, by class
    double realized_gen_w = 0.0;
    double demand_w = 0.0;       // realized load consumption after the controller
    double served_load_w = 0.0;  // demand minus any unmet shortfall
    std::vector<double> deploy_w;   // signed, pool_order
    std::vector<double> es_p_w;     // realized storage output per unit
    std::vector<double> soc_start_wh, soc_end_wh;
    std::vector<PhaseVec> w;        // per bus
    double v_min = 0.0, v_max = 0.0;  // magnitude, pu
    double exchange_w = 0.0;        // net power the reference bus had to supply
};

struct Trajectory {
    std::vector<StepRecord> steps;
    std::vector<Violation> violations;
    std::vector<std::string> device_ids;  // labels for deploy_w
};

struct SimOptions {
    double tol = 1e-7;  // pu of the model base (pu^2 for voltage)
};

Trajectory run_simulation(const grid::NetworkModel& m, const robust::RobustResult& plan, const EventTimeline& tl,
                          const SimOptions& opt = {});

struct ViolationSummary {
    std::array<int, static_cast<int>(ViolationClass::Count)> count{};
    std::array<double, static_cast<int>(ViolationClass::Count)> max{};
    int total() const;
    bool clean() const { return total() == 0; }
};

ViolationSummary violation_report(const Trajectory& traj);

}  // namespace mgres::sim

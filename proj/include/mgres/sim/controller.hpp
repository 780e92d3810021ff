#pragma once

#include <array>
#include <span>
#include <vector>

#include "mgres/dispatch/dispatch.hpp"
#include "mgres/grid/network.hpp"
#include "mgres/robust/robust.hpp"

namespace mgres::sim {

using PhaseVec = std::array<double, 3>;

struct Deployment {
    std::vector<double> amount;  // per device, same order as the capacities
    double delivered = 0.0;
    double shortfall = 0.0;
};

// deployment_d = cap_d / sum(cap) * min(imbalance, sum(cap)). A non-positive
// imbalance deploys nothing.
Deployment proportional_dispatch(double imbalance, std::span<const double> capacities);

// What an event does to the schedule at one step, W. Losses reduce the
// scheduled output one for one; load_delta is added to the scheduled demand.
// Impaired devices do not take part in reserve deployment.
struct StepDisturbance {
    std::vector<double> dg_loss, dg_cap_loss, pv_loss, load_delta;
    std::vector<char> dg_impaired, pv_impaired, load_impaired;

    static StepDisturbance none(const grid::NetworkModel& m);
    double imbalance() const;
};

// Device order used for the reserve pool and deployment vectors.
enum class DeviceClass { Pv, Dg, Es, Load };
struct DeviceRef {
    DeviceClass cls;
    int index;
};
std::vector<DeviceRef> pool_order(const grid::NetworkModel& m);

struct RealizedStep {
    std::vector<PhaseVec> pv_p, pv_q, dg_p, dg_q, es_p, es_q, load_p, load_q;  // W / var per phase
    std::vector<double> deploy;   // signed W per pool_order entry; positive raises net injection
    double imbalance = 0.0;       // generation lost plus demand added, W
    double pool = 0.0;            // reserve available in the needed direction
    double delivered = 0.0;
    double shortfall = 0.0;
};

// Applies a disturbance to step t (index into the schedule window) and
// deploys reserves proportionally. Reactive setpoints stay at schedule.
RealizedStep realize_step(const grid::NetworkModel& m, const dispatch::DispatchResult& sched,
                          const robust::ReserveSchedule& rsv, int t, const StepDisturbance& dist);

// Reserve of one device at step t in the given direction, W.
double reserve_of(const robust::ReserveSchedule& rsv, DeviceRef d, int t, bool up);

}  // namespace mgres::sim

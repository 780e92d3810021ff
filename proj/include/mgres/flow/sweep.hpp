#pragma once

#include <array>
#include <vector>

#include "mgres/grid/network.hpp"

namespace mgres::flow {

using PhaseVec = std::array<double, 3>;

struct FlowState {
    std::vector<PhaseVec> pflow;  // per branch, upstream to downstream, pu
    std::vector<PhaseVec> qflow;
    std::vector<PhaseVec> w;      // per bus, squared voltage magnitude, pu
    PhaseVec xp{};                // exchange the reference bus must supply per phase
    PhaseVec xq{};
};

// Linear branch-flow solve with injections fixed: flows accumulate from the
// leaves, voltages descend from the reference bus. `p_inj`/`q_inj` are net
// injections (generation minus load) per bus and phase, pu.
FlowState linear_flow(const grid::NetworkModel& m, const grid::Topology& topo, const std::vector<PhaseVec>& p_inj,
                      const std::vector<PhaseVec>& q_inj, double w_root = 1.0);

}  // namespace mgres::flow

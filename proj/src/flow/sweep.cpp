#include "mgres/flow/sweep.hpp"

namespace mgres::flow {

FlowState linear_flow(const grid::NetworkModel& m, const grid::Topology& topo, const std::vector<PhaseVec>& p_inj,
                      const std::vector<PhaseVec>& q_inj, double w_root) {
    const std::size_t nb = m.buses.size();
    FlowState s;
    s.pflow.assign(m.branches.size(), PhaseVec{});
    s.qflow.assign(m.branches.size(), PhaseVec{});
    s.w.assign(nb, PhaseVec{});
    // backward: flow into a bus = its net demand plus everything it passes on
    for (auto it = topo.order.rbegin(); it != topo.order.rend(); ++it) {
        const int b = *it;
        PhaseVec p{}, q{};
        for (int ph : m.buses[b].phases.list()) {
            p[ph] = -p_inj[b][ph];
            q[ph] = -q_inj[b][ph];
        }
        for (int l : topo.child_branches[b])
            for (int ph : m.branches[l].phases.list()) {
                p[ph] += s.pflow[l][ph];
                q[ph] += s.qflow[l][ph];
            }
        const int par = topo.parent_branch[b];
        if (par >= 0) {
            for (int ph : m.branches[par].phases.list()) {
                s.pflow[par][ph] = p[ph];
                s.qflow[par][ph] = q[ph];
            }
        } else {
            s.xp = p;
            s.xq = q;
        }
    }
    // forward: voltages
    for (int ph : m.buses[topo.root].phases.list()) s.w[topo.root][ph] = w_root;
    for (int b : topo.order) {
        const int l = topo.parent_branch[b];
        if (l < 0) continue;
        const auto z = grid::effective_impedance(m.branches[l], m.base);
        const int from = topo.branch_from[l];
        for (int ph : m.buses[b].phases.list())
            s.w[b][ph] = s.w[from][ph] - 2.0 * (z.r[ph] * s.pflow[l][ph] + z.x[ph] * s.qflow[l][ph]);
    }
    return s;
}

}  // namespace mgres::flow
